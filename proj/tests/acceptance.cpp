// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "ionrep/cli.hpp"
#include "ionrep/optimizer.hpp"
#include "ionrep/simulator.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>

using namespace ionrep;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("FAILED " + what);
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // <= 0: none
    std::function<Outcome()> run;
};

RepeaterParams noise_point(double coupling, double spacing, double noise)
{
    RepeaterParams p;
    p.total_km = 1000.0;
    p.spacing_km = spacing;
    p.coupling = coupling;
    p.gate_error = noise;
    p.initial_fidelity = 1.0 - noise;
    p.gate_time_s = 1e-6;
    p.fiber_speed_km_s = 2e5;
    return p;
}

RepeaterParams with_ions(RepeaterParams p, int comm)
{
    p.comm_ions = comm;
    return p;
}

BellDiagonalState random_state(std::mt19937_64& rng)
{
    std::exponential_distribution<double> e(1.0);
    std::array<double, 4> w{};
    double sum = 0.0;
    for (auto& x : w)
        sum += (x = e(rng));
    for (auto& x : w)
        x /= sum;
    w[0] = 1.0 - w[1] - w[2] - w[3];
    return BellDiagonalState(w);
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// ---------------------------------------------------------------------------

Outcome channel_oracle()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto s = random_state(rng);
        const double eps = u(rng);
        const auto fast = swap_transfer_channel(s, eps);
        const auto slow = oracle::swap_channel_bruteforce(s.probs(), eps);
        for (int i = 0; i < 4; ++i)
            worst = std::max(worst, std::abs(fast[i] - slow[i]));
    }
    o.require(worst <= 1e-12, "max deviation <= 1e-12");
    o.note(fmt::format("max |closed - brute| = {:.2e} over 100 inputs", worst));
    return o;
}

Outcome qber_oracle()
{
    Outcome o;
    double worst = 0.0;
    for (double eps : {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.3, 0.45, 0.5})
        for (int r = 0; r <= 30; ++r)
            worst = std::max(worst, std::abs(chain_qber(eps, r) - oracle::odd_parity_dp(eps, r)));
    o.require(worst <= 1e-12, "DP deviation <= 1e-12");
    o.note(fmt::format("max |closed - DP| = {:.2e}", worst));

    // 101 lossless links whose attempts always succeed: every trial reaches
    // the swap stage, leaving the 100 station flips as the only randomness.
    RepeaterParams p;
    p.total_km = 101.0;
    p.spacing_km = 1.0;
    p.attenuation_km = 1e9;
    p.coupling = 1.0;
    p.attempts = 60;
    p.gate_error = 1e-3;
    p.initial_fidelity = 1.0;
    const auto est = simulate_chain({p, ArchitectureSpec::type_i(), 10'000'000, 7, 0});
    o.require(est.stations == 100, "R = 100");
    o.require(est.qber.has_value(), "QBER estimate present");
    if (est.qber) {
        const double q = chain_qber(1e-3, 100.0);
        const double z = (est.qber->value - q) / est.qber->std_error;
        o.require(std::abs(z) <= 3.0, "|z| <= 3");
        o.note(fmt::format("MC Q = {:.6f} +- {:.1e} vs {:.6f} (z = {:+.2f})", est.qber->value, est.qber->std_error, q, z));
    }
    return o;
}

Outcome monte_carlo_vs_analytic()
{
    Outcome o;
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> links_dist(2, 60);
    int exceed = 0, compared = 0;
    for (int set = 0; set < 20; ++set) {
        const bool type2 = set % 2 == 1;
        RepeaterParams p;
        p.spacing_km = 1.0 + 9.0 * u(rng);
        const int links = links_dist(rng);
        p.total_km = links * p.spacing_km;
        p.coupling = 0.2 + 0.8 * u(rng);
        p.gate_error = std::pow(10.0, -4.0 + 2.0 * u(rng));
        p.initial_fidelity = 1.0 - std::pow(10.0, -4.0 + 2.0 * u(rng));
        p.comm_ions = type2 ? 2 * (1 + static_cast<int>(4 * u(rng))) : 1;
        const auto arch = type2 ? ArchitectureSpec::type_ii(p.comm_ions) : ArchitectureSpec::type_i();

        // Pick n_eg so the chain succeeds with probability in [0.2, 0.9].
        const double target = 0.2 + 0.7 * u(rng);
        const double per_link = std::pow(target, 1.0 / links);
        const double pl = link_success_prob(p.coupling, p.spacing_km, p.attenuation_km);
        const double ions = ions_per_link(arch, {});
        p.attempts = std::max(1L, std::lround(std::log1p(-per_link) / (ions * std::log1p(-pl))));

        const auto est = simulate_chain({p, arch, 100000, 1000u + static_cast<unsigned>(set), 0});
        const auto ana = evaluate_point(p, arch);
        auto check = [&](double value, double se, double expected) {
            ++compared;
            if (!(std::abs(value - expected) <= 3.0 * se))
                ++exceed;
        };
        check(est.p_success.value, est.p_success.std_error, ana.p_success);
        check(est.raw_rate.value, est.raw_rate.std_error, ana.raw_rate);
        if (est.qber)
            check(est.qber->value, est.qber->std_error, ana.qber);
        else
            ++compared, ++exceed;
    }
    o.require(compared == 60, "60 comparisons");
    o.require(exceed <= 2, "<= 2 exceedances of 3 SE");
    o.note(fmt::format("{} of {} comparisons outside 3 SE", exceed, compared));
    return o;
}

Outcome reference_optima()
{
    Outcome o;
    struct Column {
        const char* label;
        double coupling;
        int comm;
        long attempts_lo, attempts_hi;  // only checked at eta_c = 1
        double reference_rate;
    };
    const Column columns[] = {
        {"I,eta=1", 1.0, 1, 14, 14, 1125.0},
        {"II,eta=1", 1.0, 10, 3, 4, 5416.0},
        {"I,eta=0.1", 0.1, 1, 0, 0, 4.0},
        {"II,eta=0.1", 0.1, 10, 0, 0, 43.0},
    };
    const Conventions defaults;
    Conventions other;
    other.type1_denominator = Type1Denominator::T;
    other.type2_link_ions = Type2LinkIons::All;

    for (const auto& col : columns) {
        const auto p = with_ions(noise_point(col.coupling, 3.0, 1e-4), col.comm);
        const auto arch = col.comm == 1 ? ArchitectureSpec::type_i() : ArchitectureSpec::type_ii(col.comm);
        const auto best = optimize_spacing_refined(p, arch, Objective::MaxRsec, defaults);
        const auto alt = optimize_spacing_refined(p, arch, Objective::MaxRsec, other);
        const double r = best.best_report.secret_rate;
        const double r_alt = alt.best_report.secret_rate;

        o.require(within(best.spacing_opt_km, 3.0, 0.5), fmt::format("{} L0_opt within 3 +- 0.5", col.label));
        if (col.attempts_hi > 0)
            o.require(best.attempts_opt >= col.attempts_lo && best.attempts_opt <= col.attempts_hi,
                      fmt::format("{} n_eg_opt in [{}, {}]", col.label, col.attempts_lo, col.attempts_hi));
        o.require(r >= col.reference_rate / 2.0 && r <= col.reference_rate * 2.0,
                  fmt::format("{} R_sec within factor 2", col.label));
        const bool close = std::abs(r / col.reference_rate - 1.0) <= 0.25 || std::abs(r_alt / col.reference_rate - 1.0) <= 0.25;
        o.require(close, fmt::format("{} one convention within 25%", col.label));
        o.note(fmt::format("{}: L0={:.1f} n_eg={} R_sec={:.4g} (alt {:.4g}, n_eg={}) vs {}", col.label,
                           best.spacing_opt_km, best.attempts_opt, r, r_alt, alt.attempts_opt, col.reference_rate));
    }
    return o;
}

Outcome crossovers()
{
    Outcome o;
    struct Case {
        const char* label;
        int comm;
        double noise, target;
    };
    const Case cases[] = {
        {"I,1e-3", 1, 1e-3, 195.0},
        {"I,1e-4", 1, 1e-4, 165.0},
        {"II,1e-3", 10, 1e-3, 115.0},
        {"II,1e-4", 10, 1e-4, 105.0},
    };
    for (const auto& c : cases) {
        auto p = with_ions(noise_point(0.3, 5.0, c.noise), c.comm);
        p.source_rate_hz = 1e6;
        const auto arch = c.comm == 1 ? ArchitectureSpec::type_i() : ArchitectureSpec::type_ii(c.comm);
        const auto x = crossover_distance(p, arch, SweepAxis::stepped(Parameter::TotalKm, 5.0, 400.0, 5.0));
        o.require(x && within(*x, c.target, 15.0), fmt::format("{} within {} +- 15 km", c.label, c.target));
        o.note(x ? fmt::format("{}: {:.0f} km", c.label, *x) : fmt::format("{}: none", c.label));
    }
    return o;
}

Outcome gate_tolerance()
{
    Outcome o;
    auto p = noise_point(0.3, 3.0, 1e-4);
    const auto arch = ArchitectureSpec::type_i();
    auto has_key = [&](double eps) {
        auto q = p;
        q.gate_error = eps;
        return optimize_spacing_refined(q, arch, Objective::MaxRsec).best_report.secret_rate > 0.0;
    };
    const bool key_at_lo = has_key(2.0e-3);
    const bool key_at_hi = has_key(3.0e-3);
    o.require(key_at_lo, "positive key at eps_g = 2.0e-3");
    o.require(!key_at_hi, "no key at eps_g = 3.0e-3");

    // Locate the cutoff for the report.
    double lo = 1e-4, hi = 0.25;
    if (has_key(lo) && !has_key(hi)) {
        while (hi / lo > 1.01) {
            const double mid = std::sqrt(lo * hi);
            (has_key(mid) ? lo : hi) = mid;
        }
        o.note(fmt::format("cutoff eps_g = {:.3e} (L0 searched over [0.5, 100] km)", std::sqrt(lo * hi)));
    }
    return o;
}

Outcome per_qubit_optima()
{
    Outcome o;
    struct Case {
        const char* label;
        int comm;
        double noise, target, tol;
    };
    const Case cases[] = {
        {"I,1e-4", 1, 1e-4, 10.0, 3.0},
        {"II,1e-4", 10, 1e-4, 10.0, 3.0},
        {"I,1e-3", 1, 1e-3, 20.0, 5.0},
        {"II,1e-3", 10, 1e-3, 30.0, 5.0},
    };
    for (const auto& c : cases) {
        const auto p = with_ions(noise_point(0.1, 3.0, c.noise), c.comm);
        const auto arch = c.comm == 1 ? ArchitectureSpec::type_i() : ArchitectureSpec::type_ii(c.comm);
        const auto r = optimize_spacing_refined(p, arch, Objective::MaxRsecPerQubit);
        o.require(within(r.spacing_opt_km, c.target, c.tol),
                  fmt::format("{} per-qubit L0 within {} +- {}", c.label, c.target, c.tol));
        o.note(fmt::format("{}: per-qubit L0 = {:.1f} km", c.label, r.spacing_opt_km));
    }
    const auto grid = SweepAxis::stepped(Parameter::SpacingKm, 0.1, 100.0, 0.1);
    for (auto [noise, target, tol] : {std::tuple{1e-4, 1.5, 1.0}, std::tuple{1e-3, 15.0, 5.0}}) {
        const auto m = min_viable_spacing(noise_point(0.1, 3.0, noise), ArchitectureSpec::type_i(), grid);
        o.require(m && within(*m, target, tol), fmt::format("min viable L0 at {:.0e} within {} +- {}", noise, target, tol));
        o.note(m ? fmt::format("min viable L0 at {:.0e}: {:.1f} km", noise, *m)
                 : fmt::format("min viable L0 at {:.0e}: none", noise));
    }
    return o;
}

Outcome properties()
{
    Outcome o;
    int violations = 0;
    auto expect = [&](bool ok, const char* what) {
        if (!ok && violations++ < 5)
            o.require(false, what);
    };

    for (int i = 0; i < 10000; ++i) {
        const double q = (2.0 / 3.0) * i / 9999.0;
        expect(rci(q) >= 1.0 - 2.0 * binary_entropy(q) - 1e-15, "RCI dominance");
    }

    {
        RepeaterParams p = noise_point(0.01, 3.0, 1e-4);
        p.total_km = 3.0;
        p.attempts = 10;
        const double lo = raw_rate_type1(p).rate;
        p.coupling = 0.02;
        const double ratio = raw_rate_type1(p).rate / lo;
        expect(std::abs(ratio / 4.0 - 1.0) <= 0.05, "eta_c^2 scaling");
        o.note(fmt::format("eta_c doubling ratio {:.4f}", ratio));
    }

    {
        double worst = 0.0;
        for (auto [coupling, spacing] : {std::pair{1.0, 3.0}, std::pair{0.1, 2.9}, std::pair{0.3, 5.0}}) {
            auto p = noise_point(coupling, spacing, 1e-4);
            p.gate_time_s = 0.0;
            const double base = optimize_attempts(p, ArchitectureSpec::type_i()).report.secret_rate;
            for (double t0 : {1e-9, 1e-8, 1e-7, 1e-6}) {
                p.gate_time_s = t0;
                const double r = optimize_attempts(p, ArchitectureSpec::type_i()).report.secret_rate;
                worst = std::max(worst, std::abs(r / base - 1.0));
            }
        }
        expect(worst <= 0.05, "t0 plateau");
        o.note(fmt::format("t0 plateau max change {:.2f}%", 100.0 * worst));
    }

    {
        const auto arch = ArchitectureSpec::type_i();
        const auto base = noise_point(0.3, 5.0, 1e-4);
        auto series = [&](auto mutate, int sign) {
            double prev = sign > 0 ? -1.0 : std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 50; ++i) {
                auto p = base;
                p.attempts = 150;
                mutate(p, i / 50.0);
                const double r = evaluate_point(p, arch).secret_rate;
                expect(sign > 0 ? r >= prev : r <= prev, "secret rate monotonicity");
                prev = r;
            }
        };
        series([](RepeaterParams& p, double x) { p.gate_error = 3e-3 * x; }, -1);
        series([](RepeaterParams& p, double x) { p.initial_fidelity = 1.0 - 3e-3 * x; }, -1);
        series([](RepeaterParams& p, double x) { p.coupling = x; }, +1);
        series([](RepeaterParams& p, double x) { p.attenuation_km = 5.0 + 50.0 * x; }, +1);
        series([](RepeaterParams& p, double x) { p.gate_time_s = 1e-3 * x; }, -1);

        double prev = -1.0;
        for (long n = 1; n <= 2000; ++n) {
            const double ps = chain_success_prob(0.01, n, 200.0);
            expect(ps >= prev, "P_success monotone in n_eg");
            prev = ps;
        }
        for (double r : {1.0, 100.0, 332.3}) {
            prev = -1.0;
            for (int i = 0; i <= 500; ++i) {
                const double q = chain_qber(i / 1000.0, r);
                expect(q >= prev, "Q monotone in eps");
                prev = q;
            }
        }
        prev = 1.0;
        for (int i = 1; i <= 1000; ++i) {
            const double pl = link_success_prob(0.5, 0.1 * i, 20.0);
            expect(pl <= prev, "p monotone in L0");
            prev = pl;
        }
    }

    {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto state = random_state(rng);
        double worst = 0.0;
        for (int i = 0; i < 100000; ++i) {
            if (i % 1000 == 0)
                state = random_state(rng);
            state = swap_transfer_channel(state, std::pow(u(rng), 4.0));
            double sum = 0.0;
            for (double w : state.probs()) {
                expect(w >= 0.0 && w <= 1.0, "weights in [0,1]");
                sum += w;
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        expect(worst <= 1e-12, "normalization");
        o.note(fmt::format("normalization drift {:.1e} over 1e5 compositions", worst));
    }

    if (violations > 0)
        o.note(fmt::format("{} violations", violations));
    return o;
}

Outcome determinism()
{
    Outcome o;
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / fmt::format("ionrep_accept_{}", std::random_device{}());
    fs::create_directories(dir);
    const auto cfg = (dir / "sim.ini").string();
    std::ofstream(cfg) << "[repeater]\nL_tot = 600\nL0 = 3\neta_c = 0.8\nn_eg = 20\n[simulate]\ntrials = 20000\n";

    auto run = [&](const std::string& workers, const std::string& name) {
        const auto path = (dir / name).string();
        std::ostringstream out, err;
        const int code = run_command({"simulate", "--config", cfg, "--seed", "42", "--workers", workers, "--out", path},
                                     out, err);
        std::ifstream in(path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return code == 0 ? buf.str() : std::string{};
    };
    const auto a = run("1", "a.csv");
    const auto b = run("1", "b.csv");
    const auto c = run("4", "c.csv");
    const auto d = run("7", "d.csv");
    fs::remove_all(dir);

    o.require(!a.empty(), "simulate succeeds");
    o.require(a == b, "identical across runs");
    o.require(a == c && a == d, "identical across worker counts 1, 4, 7");
    o.note(fmt::format("{} bytes compared", a.size()));
    return o;
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "channel oracle", 1.0, channel_oracle},
        {2, "QBER oracle", 30.0, qber_oracle},
        {3, "Monte Carlo vs analytic", 120.0, monte_carlo_vs_analytic},
        {4, "reference optima and rates", 300.0, reference_optima},
        {5, "crossover distances", 120.0, crossovers},
        {6, "gate-error tolerance", 0.0, gate_tolerance},
        {7, "per-qubit optima", 0.0, per_qubit_optima},
        {8, "property suite", 60.0, properties},
        {9, "determinism", 0.0, determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, fmt::format("exception: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0)
            o.require(secs < c.time_limit_s, fmt::format("runtime < {} s", c.time_limit_s));
        failed += o.pass ? 0 : 1;
        std::cout << fmt::format("{} [{}] {} ({:.2f} s): {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail)
                  << std::flush;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
