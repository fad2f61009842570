// htc: batch front-end: eig, spectra, sweep-critical, sweep-ilp.
//
// Exit codes: 0 all outputs written, 1 config error, 2 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "htc/cli.hpp"

namespace {

struct Options {
    std::string config;
    std::string out{"."};
    std::string format{"csv"};
    int threads{1};
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "config file (key = value lines)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads for sweeps")->check(CLI::Range(1, 1024))->capture_default_str();
    sub->add_option("--set", o.overrides, "override a config key, key=value (repeatable)");
}

htc::RunContext make_context(const Options& o) {
    htc::ConfigBuilder b;
    if (!o.config.empty()) b.parse_file(o.config);
    for (const auto& kv : o.overrides) b.apply_override(kv);
    htc::RunContext ctx;
    ctx.config = b.finish();
    ctx.out_dir = o.out;
    ctx.format = o.format == "json" ? htc::OutputFormat::Json : htc::OutputFormat::Csv;
    ctx.threads = o.threads;
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holstein-Tavis-Cummings exact diagonalization and spectra"};
    app.require_subcommand(0, 1);
    bool list_keys = false;
    app.add_flag("--list-keys", list_keys, "print every config key with its default and exit");

    Options o;
    auto* eig = app.add_subcommand("eig", "eigenstates, observables and labels");
    auto* spectra = app.add_subcommand("spectra", "absorption, bound absorption and LPL spectra");
    auto* crit = app.add_subcommand("sweep-critical", "critical coupling table over sweep_n x sweep_huang_rhys");
    auto* ilp = app.add_subcommand("sweep-ilp", "LP emission intensity against pump centre");
    for (auto* s : {eig, spectra, crit, ilp}) add_common(s, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? htc::kExitOk : htc::kExitConfig;
    }
    if (list_keys) {
        std::cout << htc::describe_config_keys();
        return htc::kExitOk;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return htc::kExitConfig;
    }

    try {
        const htc::RunContext ctx = make_context(o);
        std::vector<std::filesystem::path> written;
        if (eig->parsed()) written = htc::run_eig(ctx);
        else if (spectra->parsed()) written = htc::run_spectra(ctx);
        else if (crit->parsed()) written = htc::run_sweep_critical(ctx);
        else written = htc::run_sweep_ilp(ctx);
        for (const auto& f : written) std::cout << f.string() << '\n';
        return htc::kExitOk;
    } catch (const htc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return htc::kExitConfig;
    } catch (const htc::ModelError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return htc::kExitConfig;
    } catch (const htc::OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return htc::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return htc::kExitNumerical;
    }
}
