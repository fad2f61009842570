// critical.hpp: Rabi coupling at which a symmetric-sector eigenvalue crosses zero.
//
// Only the totally symmetric sector can host the zero-energy dark polariton, so the
// search works on that block, H(Omega) = H0 + Omega * H1, which is tiny (30 x 30 at
// nu_max = 4) and independent of N in size.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "htc/eigensystem.hpp"
#include "htc/hamiltonian.hpp"
#include "htc/model.hpp"
#include "htc/symmetry.hpp"

namespace htc {

class CriticalError : public std::runtime_error {
public:
    enum class Kind { NoSignChange, TrackingAmbiguity, BadBracket };
    CriticalError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

struct CouplingBracket {
    double lo{0.0};  // single-molecule Omega, units of omega_v
    double hi{0.0};
};

struct CriticalOptions {
    double eig_tol{1e-6};      // |omega| at the returned coupling, units of omega_v
    double min_overlap{0.7};
    int scan_steps{40};
    int max_refinements{12};   // halvings of a scan step when tracking is unclear
    int max_bisections{200};
};

struct CriticalResult {
    double rabi_single{0.0};
    double rabi_collective{0.0};  // sqrt(N) Omega
    double omega{0.0};            // tracked eigenvalue at rabi_single
    int evaluations{0};
};

class SymmetricBlock {
public:
    explicit SymmetricBlock(ModelParams p) : params_(std::move(p)) {
        params_.rabi_single = 0.0;
        params_.validate();
        const Basis exc = enumerate_excitation_basis(params_);
        const SectorBasis sb = symmetric_sector(params_, exc);
        h0_ = sector_hamiltonian(build_hamiltonian(params_, exc), sb);
        ModelParams unit = params_;
        unit.rabi_single = 1.0;
        h1_ = sector_hamiltonian(build_hamiltonian(unit, exc), sb) - h0_;
    }

    Spectrum at(double rabi) const { return diagonalize(Eigen::MatrixXd(h0_ + rabi * h1_)); }
    Eigen::Index dim() const { return h0_.rows(); }
    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    Eigen::MatrixXd h0_;
    Eigen::MatrixXd h1_;
};

namespace detail {

struct Tracked {
    double rabi{0.0};
    double omega{0.0};
    Eigen::VectorXd vec;
};

inline Eigen::Index best_match(const Spectrum& s, const Eigen::VectorXd& ref, double& overlap) {
    const Eigen::VectorXd ov = (s.vectors.transpose() * ref).cwiseAbs();
    Eigen::Index k = 0;
    overlap = ov.maxCoeff(&k);
    return k;
}

}  // namespace detail

// Bisection on the eigenvalue tracked from the one nearest zero at bracket.lo.
inline CriticalResult find_critical_coupling(const ModelParams& p, CouplingBracket bracket,
                                             const CriticalOptions& opt = {}) {
    if (!(bracket.lo >= 0.0) || !(bracket.hi > bracket.lo))
        throw CriticalError(CriticalError::Kind::BadBracket, "critical: bracket needs 0 <= lo < hi");
    if (opt.scan_steps < 1) throw CriticalError(CriticalError::Kind::BadBracket, "critical: scan_steps must be >= 1");
    const SymmetricBlock block(p);
    CriticalResult res;

    auto eval = [&](double rabi, const Eigen::VectorXd& ref, double& overlap) {
        ++res.evaluations;
        const Spectrum s = block.at(rabi);
        const Eigen::Index k = detail::best_match(s, ref, overlap);
        Eigen::VectorXd v = s.vectors.col(k);
        if (v.dot(ref) < 0.0) v = -v;
        return detail::Tracked{rabi, s.values(k), std::move(v)};
    };

    detail::Tracked left;
    {
        ++res.evaluations;
        const Spectrum s = block.at(bracket.lo);
        Eigen::Index k = 0;
        s.values.cwiseAbs().minCoeff(&k);
        left = {bracket.lo, s.values(k), s.vectors.col(k)};
    }
    if (left.omega == 0.0) {
        res.rabi_single = left.rabi;
        res.omega = 0.0;
        res.rabi_collective = std::sqrt(static_cast<double>(p.n_molecules)) * left.rabi;
        return res;
    }

    // Scan forward until the tracked eigenvalue changes sign.
    const double step = (bracket.hi - bracket.lo) / opt.scan_steps;
    detail::Tracked right;
    bool found = false;
    while (left.rabi < bracket.hi && !found) {
        double h = std::min(step, bracket.hi - left.rabi);
        double overlap = 0.0;
        detail::Tracked next;
        int refinements = 0;
        for (;;) {
            next = eval(left.rabi + h, left.vec, overlap);
            if (overlap > opt.min_overlap) break;
            if (++refinements > opt.max_refinements)
                throw CriticalError(CriticalError::Kind::TrackingAmbiguity,
                                    "critical: eigenvector overlap " + std::to_string(overlap) + " < " +
                                        std::to_string(opt.min_overlap) + " near Omega = " +
                                        std::to_string(left.rabi));
            h *= 0.5;
        }
        if ((next.omega > 0.0) != (left.omega > 0.0) || next.omega == 0.0) {
            right = std::move(next);
            found = true;
        } else {
            left = std::move(next);
        }
    }
    if (!found)
        throw CriticalError(CriticalError::Kind::NoSignChange,
                            "critical: tracked eigenvalue does not change sign in [" + std::to_string(bracket.lo) +
                                ", " + std::to_string(bracket.hi) + "]");

    // Bisection; both ends keep their tracked vectors so the midpoint is matched locally.
    detail::Tracked best = std::abs(left.omega) < std::abs(right.omega) ? left : right;
    for (int it = 0; it < opt.max_bisections && std::abs(best.omega) > opt.eig_tol; ++it) {
        double overlap = 0.0;
        const double mid = 0.5 * (left.rabi + right.rabi);
        detail::Tracked m = eval(mid, left.vec, overlap);
        if (overlap <= opt.min_overlap)
            throw CriticalError(CriticalError::Kind::TrackingAmbiguity,
                                "critical: eigenvector overlap " + std::to_string(overlap) + " during bisection at Omega = " +
                                    std::to_string(mid));
        if (std::abs(m.omega) < std::abs(best.omega)) best = m;
        if ((m.omega > 0.0) == (left.omega > 0.0))
            left = std::move(m);
        else
            right = std::move(m);
        if (right.rabi - left.rabi < 1e-15 * std::max(1.0, right.rabi)) break;
    }
    res.rabi_single = best.rabi;
    res.omega = best.omega;
    res.rabi_collective = std::sqrt(static_cast<double>(p.n_molecules)) * best.rabi;
    return res;
}

// Same search with the bracket given in collective units sqrt(N) Omega.
inline CriticalResult find_critical_coupling_collective(const ModelParams& p, double lo, double hi,
                                                        const CriticalOptions& opt = {}) {
    const double s = std::sqrt(static_cast<double>(p.n_molecules));
    return find_critical_coupling(p, {lo / s, hi / s}, opt);
}

}  // namespace htc
