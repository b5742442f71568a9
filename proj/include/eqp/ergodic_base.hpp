// ergodic_base.hpp: driving systems (finite cycle, i.i.d. shift, circle
// rotation), their Koopman peripheral data, and process assembly.

#pragma once

#include "eqp/channel.hpp"
#include "eqp/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

namespace eqp {

// theta(l) = perm[l]; uniform measure.
struct FiniteCycleBase {
    std::vector<std::size_t> perm;

    static FiniteCycleBase cycle(std::size_t n) {
        if (n == 0) fail(ErrorKind::InvalidArgument, "FiniteCycleBase: n must be positive");
        FiniteCycleBase b;
        b.perm.resize(n);
        for (std::size_t l = 0; l < n; ++l) b.perm[l] = (l + 1) % n;
        return b;
    }

    static FiniteCycleBase permutation(std::vector<std::size_t> p) {
        std::vector<std::size_t> sorted = p;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t l = 0; l < sorted.size(); ++l)
            if (sorted[l] != l) fail(ErrorKind::InvalidArgument, "FiniteCycleBase: not a permutation");
        if (p.empty()) fail(ErrorKind::InvalidArgument, "FiniteCycleBase: empty permutation");
        return FiniteCycleBase{std::move(p)};
    }

    std::size_t size() const noexcept { return perm.size(); }
    std::size_t next(std::size_t l) const { return perm[l]; }
    std::size_t prev(std::size_t l) const {
        return static_cast<std::size_t>(std::find(perm.begin(), perm.end(), l) - perm.begin());
    }
    std::size_t advance(std::size_t l, std::size_t k) const {
        for (std::size_t j = 0; j < k; ++j) l = perm[l];
        return l;
    }
    bool is_single_cycle() const {
        std::size_t l = 0, len = 0;
        do {
            l = perm[l];
            ++len;
        } while (l != 0 && len <= perm.size());
        return len == perm.size();
    }
};

// i.i.d. shift over a finite support: label i drawn with probability probs[i].
struct IIDBase {
    std::vector<double> probs;

    bool valid() const {
        if (probs.empty()) return false;
        double s = 0.0;
        for (double p : probs) {
            if (!(p > 0.0)) return false;
            s += p;
        }
        return std::abs(s - 1.0) <= 1e-12;
    }
};

// s -> s + t mod 1 on [0, 1); t is rejected when within 1e-12 of p/q, q <= max_denominator.
struct RotationBase {
    double t = 0.0;
    std::size_t max_denominator = 1000;

    std::optional<std::pair<long, long>> rational_neighbor() const {
        for (long q = 1; q <= static_cast<long>(max_denominator); ++q) {
            const long p = std::lround(t * static_cast<double>(q));
            if (std::abs(t - static_cast<double>(p) / static_cast<double>(q)) <= 1e-12) return std::make_pair(p, q);
        }
        return std::nullopt;
    }
    bool passes_guard() const { return t > 0.0 && t < 1.0 && !rational_neighbor().has_value(); }
};

using Base = std::variant<FiniteCycleBase, IIDBase, RotationBase>;

inline const char* base_kind(const Base& b) {
    if (std::holds_alternative<FiniteCycleBase>(b)) return "cycle";
    if (std::holds_alternative<IIDBase>(b)) return "iid";
    return "rotation";
}

inline bool check_ergodic(const FiniteCycleBase& b) { return b.is_single_cycle(); }
inline bool check_ergodic(const IIDBase& b) { return b.valid(); }
inline bool check_ergodic(const RotationBase& b) { return b.passes_guard(); }
inline bool check_ergodic(const Base& b) {
    return std::visit([](const auto& x) { return check_ergodic(x); }, b);
}

// ---------------------------------------------------------------------------
// Koopman peripheral spectrum

inline constexpr int kKoopmanKMax = 32;
inline constexpr double kTolRoot = 1e-8;

struct KoopmanSpectrum {
    enum class Kind { Finite, Trivial, Rotation } kind = Kind::Trivial;
    std::size_t n = 1;   // finite: cycle length
    double t = 0.0;      // rotation number
    int k_max = kKoopmanKMax;

    // Explicit list (finite and trivial cases): e(k/n), k = 0..n-1.
    std::vector<cplx> roots() const {
        std::vector<cplx> out;
        if (kind == Kind::Rotation) {
            for (int k = -k_max; k <= k_max; ++k) out.push_back(expi(k * t));
            return out;
        }
        for (std::size_t k = 0; k < n; ++k) out.push_back(expi(static_cast<double>(k) / static_cast<double>(n)));
        return out;
    }

    bool member(cplx lambda, double tol = kTolRoot) const {
        for (cplx r : roots())
            if (std::abs(lambda - r) <= tol) return true;
        return false;
    }
};

inline KoopmanSpectrum koopman_peripheral(const Base& base) {
    if (!check_ergodic(base)) fail(ErrorKind::InvalidArgument, "koopman_peripheral: base is not ergodic");
    KoopmanSpectrum k;
    if (const auto* f = std::get_if<FiniteCycleBase>(&base)) {
        k.kind = KoopmanSpectrum::Kind::Finite;
        k.n = f->size();
    } else if (const auto* r = std::get_if<RotationBase>(&base)) {
        k.kind = KoopmanSpectrum::Kind::Rotation;
        k.t = r->t;
    }
    return k;
}

// f with f(theta(l)) = beta f(l), f(0) = 1, beta snapped to the nearest n-th root.
inline std::vector<cplx> koopman_eigenfunction(const FiniteCycleBase& base, cplx beta) {
    if (!base.is_single_cycle()) fail(ErrorKind::InvalidArgument, "koopman_eigenfunction: base is not a single cycle");
    const std::size_t n = base.size();
    const double kd = std::round(turn_of(beta, 0.0) * static_cast<double>(n));
    const auto k = static_cast<std::size_t>(kd) % n;
    const cplx snapped = expi(static_cast<double>(k) / static_cast<double>(n));
    if (std::abs(beta - snapped) > 1e-9) fail(ErrorKind::NotAnEigenvalue, "koopman_eigenfunction: beta is not an n-th root of unity");
    std::vector<cplx> f(n);
    std::size_t l = 0;
    for (std::size_t j = 0; j < n; ++j) {
        f[l] = expi(static_cast<double>((j * k) % n) / static_cast<double>(n));
        l = base.next(l);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Processes

struct ProcessInstance {
    Base base;
    Index dim = 0;
    std::vector<KrausChannel> channels;
    // cycle: channel index per point; iid: channel index per support label;
    // rotation: channel index per interval [breakpoints[j], breakpoints[j+1]).
    std::vector<std::size_t> assignment;
    std::vector<double> breakpoints;

    const KrausChannel& channel_at_point(std::size_t l) const { return channels[assignment[l]]; }

    std::size_t interval_of(double s) const {
        const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
        const auto j = static_cast<std::size_t>(it - breakpoints.begin());
        return std::min(j == 0 ? 0 : j - 1, assignment.size() - 1);
    }
    const KrausChannel& channel_at_rotation(double s) const { return channels[assignment[interval_of(s)]]; }

    const FiniteCycleBase& cycle() const {
        if (const auto* f = std::get_if<FiniteCycleBase>(&base)) return *f;
        fail(ErrorKind::UnsupportedBase, "operation requires a finite cycle base");
    }
    bool is_finite() const { return std::holds_alternative<FiniteCycleBase>(base); }
    bool is_iid() const { return std::holds_alternative<IIDBase>(base); }
    bool is_rotation() const { return std::holds_alternative<RotationBase>(base); }
};

// Validates shapes, CPTP-ness, assignment ranges and the base.
inline ProcessInstance make_process(Base base, std::vector<KrausChannel> chans, std::vector<std::size_t> assignment,
                                    std::vector<double> breakpoints = {}) {
    if (chans.empty()) fail(ErrorKind::InvalidArgument, "process needs at least one channel");
    ProcessInstance p;
    p.dim = chans.front().dim();
    for (const auto& c : chans) {
        if (c.dim() != p.dim) fail(ErrorKind::DimensionMismatch, "process channels must share a dimension");
        require_cptp(c);
    }
    for (std::size_t a : assignment)
        if (a >= chans.size()) fail(ErrorKind::InvalidArgument, "assignment refers to a missing channel");
    if (const auto* f = std::get_if<FiniteCycleBase>(&base)) {
        if (assignment.size() != f->size()) fail(ErrorKind::InvalidArgument, "cycle assignment needs one channel per point");
    } else if (const auto* i = std::get_if<IIDBase>(&base)) {
        if (!i->valid()) fail(ErrorKind::InvalidArgument, "i.i.d. probabilities must be positive and sum to 1");
        if (assignment.empty()) {
            assignment.resize(i->probs.size());
            std::iota(assignment.begin(), assignment.end(), std::size_t{0});
        }
        if (assignment.size() != i->probs.size()) fail(ErrorKind::InvalidArgument, "i.i.d. assignment needs one channel per label");
    } else {
        const auto& r = std::get<RotationBase>(base);
        if (!(r.t > 0.0 && r.t < 1.0)) fail(ErrorKind::InvalidArgument, "rotation number must lie in (0, 1)");
        if (const auto pq = r.rational_neighbor())
            fail(ErrorKind::RationalRotation, "rotation number is within 1e-12 of " + std::to_string(pq->first) + "/" +
                                                  std::to_string(pq->second));
        if (breakpoints.size() != assignment.size() + 1 || breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
            fail(ErrorKind::InvalidArgument, "rotation breakpoints must run from 0 to 1 with one channel per interval");
        for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
            if (!(breakpoints[j] < breakpoints[j + 1])) fail(ErrorKind::InvalidArgument, "rotation breakpoints must increase");
    }
    p.base = std::move(base);
    p.channels = std::move(chans);
    p.assignment = std::move(assignment);
    p.breakpoints = std::move(breakpoints);
    return p;
}

// i.i.d. base: the channel averaged over the support.
inline KrausChannel averaged_channel(const ProcessInstance& process) {
    if (process.is_finite() && process.cycle().size() == 1) return process.channel_at_point(0);
    if (!process.is_iid()) fail(ErrorKind::UnsupportedBase, "averaged_channel: needs an i.i.d. or one-point base");
    const auto& probs = std::get<IIDBase>(process.base).probs;
    std::vector<KrausChannel> support;
    for (std::size_t a : process.assignment) support.push_back(process.channels[a]);
    return average_channel(support, probs);
}

// frac(s0 + j t) with the product and sum carried in double-double.
inline double rotation_point(double s0, double t, std::uint64_t j) {
    const auto jd = static_cast<double>(j);
    const double p = jd * t;
    const double pe = std::fma(jd, t, -p);
    const double s = s0 + p;
    const double bp = s - s0;
    const double se = (s0 - (s - bp)) + (p - bp) + pe;
    double r = (s - std::floor(s)) + se;
    r -= std::floor(r);
    return r >= 1.0 ? 0.0 : r;
}

struct OrbitStep {
    double point = 0.0;       // cycle: point index; rotation: s in [0, 1); iid: sampled label
    std::size_t channel = 0;  // index into process.channels
};

// Points theta^1(w) .. theta^N(w) with the channel acting there. `start` is the
// point index (cycle) or s (rotation); i.i.d. orbits draw from stream `seed`.
inline std::vector<OrbitStep> orbit(const ProcessInstance& process, double start, std::size_t length,
                                    std::uint64_t seed = 0) {
    if (length == 0) fail(ErrorKind::InvalidArgument, "orbit: length must be positive");
    std::vector<OrbitStep> out;
    out.reserve(length);
    if (const auto* f = std::get_if<FiniteCycleBase>(&process.base)) {
        auto l = static_cast<std::size_t>(start);
        if (l >= f->size()) fail(ErrorKind::InvalidArgument, "orbit: start point outside the base");
        for (std::size_t j = 0; j < length; ++j) {
            l = f->next(l);
            out.push_back({static_cast<double>(l), process.assignment[l]});
        }
    } else if (const auto* i = std::get_if<IIDBase>(&process.base)) {
        Rng rng = Rng::stream(seed, 0);
        for (std::size_t j = 0; j < length; ++j) {
            const std::size_t label = rng.categorical(i->probs);
            out.push_back({static_cast<double>(label), process.assignment[label]});
        }
    } else {
        const auto& r = std::get<RotationBase>(process.base);
        if (!r.passes_guard()) fail(ErrorKind::RationalRotation, "orbit: rotation number fails the rationality guard");
        for (std::size_t j = 1; j <= length; ++j) {
            const double s = rotation_point(start, r.t, j);
            out.push_back({s, process.assignment[process.interval_of(s)]});
        }
    }
    return out;
}

} // namespace eqp
