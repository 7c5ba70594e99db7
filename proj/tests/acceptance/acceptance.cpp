// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all nine
//   acceptance 3 7        run a subset
//
// Exit status is 0 only when every selected criterion passes.

#include "aisim/config.hpp"
#include "aisim/dynamics.hpp"
#include "aisim/equilibrium.hpp"
#include "aisim/error.hpp"
#include "aisim/format.hpp"
#include "aisim/harness.hpp"
#include "aisim/metrics.hpp"
#include "aisim/stability.hpp"
#include "aisim/synthetic.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace aisim;
using namespace aisim::harness;

namespace {

const std::string kData = AISIM_DATA_DIR;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    std::vector<std::string> failures;

    [[nodiscard]] std::string detail() const {
        std::string out;
        for (const auto& n : notes) out += (out.empty() ? "" : "; ") + n;
        if (!failures.empty()) {
            out += std::string(out.empty() ? "" : " | ") + "failed:";
            for (const auto& f : failures) out += " [" + f + "]";
        }
        return out;
    }
};

class Timer {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

void require(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.failures.push_back(what);
    }
}

void note(Outcome& o, const std::string& what) { o.notes.push_back(what); }

Config config(const std::string& name) { return load_config(kData + "/configs/" + name + ".json"); }

/// Average ranks, ties sharing the mean rank.
std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double max_abs_rhs(const Grid& g, const std::vector<double>& theta0) {
    const State ds = rhs(g, State::at_rest(g, theta0), VsgPolicy::plain());
    double w = 0.0;
    for (double x : ds.theta) w = std::max(w, std::abs(x));
    for (double x : ds.omega) w = std::max(w, std::abs(x));
    for (double x : ds.m) w = std::max(w, std::abs(x));
    return w;
}

// ============================================================================
// 1. Fixed points of random grids
// ============================================================================

Outcome fixed_points() {
    Outcome o;
    Timer timer;
    double worst = 0.0;
    std::size_t smallest = 1000, largest = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Grid g = synthetic::random_mixed(seed, 4, 40);
        smallest = std::min(smallest, g.size());
        largest = std::max(largest, g.size());
        try {
            const FixedPoint fp = solve_fixed_point(g);
            worst = std::max(worst, max_abs_rhs(g, fp.theta0));
        } catch (const Error& e) {
            require(o, false, "seed " + std::to_string(seed) + ": " + e.what());
        }
    }
    const double t = timer.seconds();
    require(o, worst < 1e-10, "max |rhs| " + fmt(worst) + " >= 1e-10");
    require(o, t < 10.0, "runtime " + fmt(t) + " s >= 10 s");
    note(o, "20 grids of " + std::to_string(smallest) + "-" + std::to_string(largest) +
                " nodes, max |rhs| " + fmt(worst) + ", " + fmt(t) + " s");
    return o;
}

// ============================================================================
// 2. Spectrum union on all-VSG grids
// ============================================================================

Outcome spectrum_union() {
    Outcome o;
    Timer timer;
    double worst_pair = 0.0, worst_abscissa = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Grid g = synthetic::random_all_vsg(seed, 10);
        try {
            const SpectrumReport r =
                spectrum_union_check(g, solve_fixed_point(g).theta0, std::numeric_limits<double>::infinity());
            require(o, r.all_vsg, "seed " + std::to_string(seed) + " is not all-VSG");
            worst_pair = std::max(worst_pair, r.max_pairing_distance);
            worst_abscissa = std::max(worst_abscissa, r.spectral_abscissa);
        } catch (const Error& e) {
            require(o, false, "seed " + std::to_string(seed) + ": " + e.what());
        }
    }
    const double t = timer.seconds();
    require(o, worst_pair < 1e-8, "pairing distance " + fmt(worst_pair));
    require(o, worst_abscissa < 0.0, "spectral abscissa " + fmt(worst_abscissa));
    require(o, t < 30.0, "runtime " + fmt(t) + " s");
    note(o, "50 grids, max pairing distance " + fmt(worst_pair) + ", max abscissa " +
                fmt(worst_abscissa) + ", " + fmt(t) + " s");
    return o;
}

// ============================================================================
// 3. Analytic oracles
// ============================================================================

Trajectory synthetic_decay(const Grid& g, double a, double lambda, double m,
                           const std::function<double(std::size_t)>& sign) {
    Trajectory tr = Trajectory::empty_for(g);
    const std::size_t n = g.size();
    std::vector<double> th(n, 0.0), w(n), r(n), mm(n, m);
    const double dt = 1e-3;
    for (std::size_t s = 0; s <= 80000; ++s) {
        const double t = static_cast<double>(s) * dt;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = sign(i) * a * std::exp(-lambda * t);
            r[i] = -lambda * w[i];
        }
        tr.append(t, th, w, r, mm);
    }
    return tr;
}

Outcome analytic_oracles() {
    Outcome o;
    auto close = [&](double got, double want, double tol, const std::string& what) {
        require(o, std::abs(got - want) < tol, what + " = " + format_double(got) + " vs " + format_double(want));
    };

    // Two-bus equilibrium.
    {
        GridSpec spec;
        Node g0;
        g0.id = 0;
        g0.kind = NodeKind::Generator;
        g0.P = 0.5;
        g0.m = 1.0;
        g0.d = 0.3;
        Node l1;
        l1.id = 1;
        l1.kind = NodeKind::Load;
        l1.P = -0.5;
        spec.nodes = {g0, l1};
        spec.lines = {{0, 1, 1.0}};
        const FixedPoint fp = solve_fixed_point(Grid::build(std::move(spec)));
        close(fp.theta0[1], -std::asin(0.5), 1e-10, "two-bus theta");
    }
    // Inertia relaxation of an isolated VSG from m0 = 1 towards m_min = 0.2.
    {
        GridSpec spec;
        Node v;
        v.id = 0;
        v.kind = NodeKind::Vsg;
        v.m = 1.0;
        v.m_min = 0.2;
        v.d = 0.3;
        v.alpha = 1.0;
        v.beta = 5.0;
        spec.nodes = {v};
        IntegrationOptions opt;
        opt.t_end = 1.0;
        opt.sample_dt = 0.1;
        const Trajectory tr = integrate(Grid::build(std::move(spec)), std::nullopt, VsgPolicy::rearm({1.0}), opt);
        // 0.2 + 0.8 e^{-1} = 0.4943036; the stated 0.49430 is its 5-digit rounding.
        close(tr.row(tr.inertia, 2)[0], 0.2 + 0.8 * std::exp(-1.0), 1e-6, "m(0.2)");
        close(std::round(tr.row(tr.inertia, 2)[0] * 1e5) / 1e5, 0.49430, 1e-12, "m(0.2) to 5 digits");
    }
    // Initial RoCoF on a faulted VSG.
    {
        const Grid g = synthetic::four_node();
        IntegrationOptions opt;
        opt.t_end = 1.0;
        const Trajectory tr = integrate(g, Fault{1, -1.0, 0.0}, VsgPolicy::plain(), opt);
        close(tr.row(tr.rocof, 0)[1], -1.0 / g.node(1).m_min, 1e-9, "initial RoCoF");
    }
    // Metric closed forms on synthetic trajectories.
    {
        GridSpec one;
        Node n;
        n.id = 0;
        n.kind = NodeKind::Generator;
        n.m = 2.0;
        n.d = 0.6;
        n.area = "A";
        one.nodes = {n};
        const Grid g1 = Grid::build(one);
        const auto plus = [](std::size_t) { return 1.0; };
        const Trajectory a = synthetic_decay(g1, 0.1, 0.5, 2.0, plus);
        close(l2_freq(a, 0.0), 0.01, 1e-6, "l2_freq");
        close(l2_rocof(a), 0.0025, 1e-6, "l2_rocof");
        close(inertial_energy(a), 0.2, 1e-6, "e_rot");

        const Trajectory b = synthetic_decay(g1, 0.05, 0.3, 2.0, plus);
        const double t_exact = std::log(0.05 / (2.0 * std::numbers::pi * 1e-3)) / 0.3;
        close(resync_time(b, 0.0), t_exact, 1e-6, "t_sync");
        close(std::round(resync_time(b, 0.0) * 1e3) / 1e3, 6.914, 1e-12, "t_sync to 3 decimals");
        note(o, "t_sync " + format_double(resync_time(b, 0.0)));
    }
    if (o.pass) note(o, "two-bus, m(0.2), initial RoCoF, 4 metric closed forms");
    return o;
}

// ============================================================================
// 4. Deadband consistency
// ============================================================================

std::vector<double> flat_trajectory(const Trajectory& tr) {
    std::vector<double> v = tr.theta;
    v.insert(v.end(), tr.frequency.begin(), tr.frequency.end());
    v.insert(v.end(), tr.inertia.begin(), tr.inertia.end());
    return v;
}

Outcome deadband_scaling() {
    Outcome o;
    const Grid g = synthetic::four_node();
    const Fault fault{1, -1.0, 0.0};
    IntegrationOptions opt;
    opt.t_end = 60.0;
    opt.sample_dt = 1e-2;
    const auto plain = flat_trajectory(integrate(g, fault, VsgPolicy::plain(), opt));
    std::vector<double> lx, ly;
    std::string devs;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        const auto db = flat_trajectory(integrate(g, fault, VsgPolicy::deadband(eps), opt));
        double sup = 0.0;
        for (std::size_t i = 0; i < plain.size(); ++i) sup = std::max(sup, std::abs(plain[i] - db[i]));
        lx.push_back(std::log(eps));
        ly.push_back(std::log(sup));
        devs += (devs.empty() ? "" : ", ") + fmt(sup);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 3.0;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    require(o, std::abs(slope - 1.0) <= 0.15, "exponent " + fmt(slope));
    note(o, "sup deviations " + devs + ", fitted exponent " + format_double(slope));
    return o;
}

// ============================================================================
// 5. Terminal synchronization
// ============================================================================

Outcome terminal_sync() {
    Outcome o;
    for (const char* name : {"four_node", "rts96", "synthetic40", "barbell"}) {
        Scenario s = config(name).scenario;
        s.integration.t_end = 200.0;
        s.integration.sample_dt = 0.01;
        const ResolvedScenario r = resolve(s);
        std::vector<double> last;
        double t_last = 0.0;
        const IntegrationSummary sum = simulate(r.grid, r.fault, r.policy, s.integration, [&](const SampleView& v) {
            t_last = v.t;
            last.assign(v.frequency.begin(), v.frequency.end());
        });
        const double expect = r.fault.delta_P / r.grid.total_damping();
        double dev = 0.0, mean = 0.0;
        for (double f : last) {
            dev = std::max(dev, std::abs(f - sum.omega_sync));
            mean += f / static_cast<double>(last.size());
        }
        const std::string tag = std::string(name) + ": ";
        require(o, t_last == 200.0, tag + "last sample at " + fmt(t_last));
        require(o, dev < 1e-5, tag + "max |omega - omega_sync| " + fmt(dev));
        require(o, std::abs(sum.omega_sync - expect) < 1e-6, tag + "omega_sync");
        require(o, std::abs(mean - expect) < 1e-6, tag + "mean terminal frequency " + format_double(mean));
        note(o, tag + "dev " + fmt(dev));
    }
    return o;
}

// ============================================================================
// 6. alpha-beta sweep trends
// ============================================================================

Outcome sweep_trends() {
    Outcome o;
    Timer timer;
    const Config cfg = config("rts96");
    SweepSpec spec{cfg.scenario, default_axis(), default_axis()};
    const std::size_t jobs = std::max<std::size_t>(4, std::thread::hardware_concurrency());
    const SweepResult r = sweep_alpha_beta(spec, jobs);
    const double t = timer.seconds();

    std::size_t failed = 0;
    for (const SweepCell& c : r.cells) failed += c.report ? 0 : 1;
    require(o, failed == 0, std::to_string(failed) + " failed cells");
    require(o, r.alphas.size() == 12 && r.betas.size() == 12, "12 x 12 grid");
    if (failed) return o;

    auto index_of = [](const std::vector<double>& axis, double v) {
        return static_cast<std::size_t>(std::find(axis.begin(), axis.end(), v) - axis.begin());
    };
    auto along_beta = [&](std::size_t ia, Metric m) {
        std::vector<double> y;
        for (std::size_t ib = 0; ib < r.betas.size(); ++ib) y.push_back(r.at(ia, ib).ratios[m]);
        return spearman(r.betas, y);
    };
    auto along_alpha = [&](std::size_t ib, Metric m) {
        std::vector<double> y;
        for (std::size_t ia = 0; ia < r.alphas.size(); ++ia) y.push_back(r.at(ia, ib).ratios[m]);
        return spearman(r.alphas, y);
    };

    // (a) and (b) at the anchor values 5 and 10.
    for (double anchor : {5.0, 10.0}) {
        const std::size_t ia = index_of(r.alphas, anchor);
        const std::size_t ib = index_of(r.betas, anchor);
        const double rf = along_beta(ia, Metric::L2Freq);
        const double rt = along_beta(ia, Metric::TSync);
        const double rr = along_alpha(ib, Metric::L2Rocof);
        const std::string at = "=" + format_double(anchor);
        require(o, rf < -0.8, "(a) l2_freq rho over beta at alpha" + at + " is " + fmt(rf));
        require(o, rt < -0.8, "(a) t_sync rho over beta at alpha" + at + " is " + fmt(rt));
        require(o, rr < -0.8, "(b) l2_rocof rho over alpha at beta" + at + " is " + fmt(rr));
        note(o, "alpha" + at + ": rho(l2_freq) " + fmt(rf) + ", rho(t_sync) " + fmt(rt) + "; beta" + at +
                    ": rho(l2_rocof) " + fmt(rr));
    }

    // (c) diagonals of equal alpha / beta.
    std::map<long long, std::vector<double>> diag;
    for (const SweepCell& c : r.cells) {
        diag[std::llround(std::log(c.alpha / c.beta) * 1e6)].push_back(c.ratios[Metric::L2Freq]);
    }
    double spread = 0.0;
    double spread_ratio = 0.0;
    for (const auto& [key, v] : diag) {
        if (v.size() < 2) continue;
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double s = *hi / *lo - 1.0;
        if (s > spread) {
            spread = s;
            spread_ratio = std::exp(static_cast<double>(key) * 1e-6);
        }
    }
    require(o, spread < 0.10, "(c) l2_freq varies " + fmt(100.0 * spread) + "% along alpha/beta=" + fmt(spread_ratio));

    // (d) all four ratios below 1 at alpha = beta = 5.
    const SweepCell& five = r.at(index_of(r.alphas, 5.0), index_of(r.betas, 5.0));
    std::string d;
    for (Metric m : kPerformanceMetrics) {
        require(o, five.ratios[m] < 1.0, "(d) " + to_string(m) + " ratio " + fmt(five.ratios[m]));
        d += (d.empty() ? "" : " ") + to_string(m) + "=" + fmt(five.ratios[m]);
    }
    note(o, "(c) max diagonal spread " + fmt(100.0 * spread) + "%; (d) " + d);
    require(o, t < 300.0, "runtime " + fmt(t) + " s");
    note(o, std::to_string(r.cells.size() + 1) + " runs on " + std::to_string(jobs) + " jobs in " + fmt(t) + " s");
    return o;
}

// ============================================================================
// 7. Fault response on the RTS-like grid
// ============================================================================

Outcome fault_response() {
    Outcome o;
    const Config plain_cfg = config("rts96");
    const Config rearm_cfg = config("rts96_rearm");
    const std::size_t node = plain_cfg.scenario.fault.node;
    const RunResult adaptive = run_scenario(plain_cfg.scenario);
    const RunResult constant = run_scenario(constant_baseline(plain_cfg.scenario));
    const RunResult rearm = run_scenario(rearm_cfg.scenario);

    const MetricsReport& a = adaptive.metrics;
    const MetricsReport& c = constant.metrics;
    const MetricsReport& r = rearm.metrics;
    require(o, a.converged && c.converged && r.converged, "runs converged");
    require(o, a.t_sync < c.t_sync, "t_sync adaptive " + fmt(a.t_sync) + " vs constant " + fmt(c.t_sync));
    const double rocof_gain = a.node_max_rocof.at(node) / r.node_max_rocof.at(node);
    require(o, rocof_gain > 2.0, "rearm max RoCoF reduction " + fmt(rocof_gain));
    const double freq_loss = r.l2_freq / a.l2_freq - 1.0;
    require(o, freq_loss < 0.20, "rearm l2_freq worse by " + fmt(100.0 * freq_loss) + "%");
    const double coh = a.coherency / c.coherency;
    require(o, coh < 1.0, "coherency ratio " + fmt(coh));
    note(o, "t_sync " + fmt(a.t_sync) + " s vs " + fmt(c.t_sync) + " s; max RoCoF at node " + std::to_string(node) +
                " " + fmt(a.node_max_rocof.at(node)) + " -> " + fmt(r.node_max_rocof.at(node)) + " (" +
                fmt(rocof_gain) + "x); rearm l2_freq " + (freq_loss >= 0 ? "+" : "") + fmt(100.0 * freq_loss) +
                "%; coherency ratio " + fmt(coh));
    return o;
}

// ============================================================================
// 8. Placement on the barbell grid
// ============================================================================

Outcome placement() {
    Outcome o;
    const Config cfg = config("barbell");
    require(o, cfg.has_placement, "barbell config has a placement section");
    if (!o.pass) return o;
    const CampaignResult serial = placement_compare(cfg.placement, 1);
    const CampaignResult parallel = placement_compare(cfg.placement, 8);
    std::ostringstream a, b;
    write_campaign_csv(a, serial);
    write_campaign_csv(b, parallel);
    require(o, a.str() == b.str(), "campaign CSV differs between 1 and 8 jobs");
    require(o, serial.failures == 0, std::to_string(serial.failures) + " failed faults");

    const auto arm_list = synthetic::barbell_arm_nodes();
    const std::set<std::size_t> arm(arm_list.begin(), arm_list.end());
    std::size_t arm_faults = 0;
    for (const CampaignRow& row : serial.rows) arm_faults += arm.count(row.node);
    require(o, arm_faults > 0, "no arm-node faults");

    std::size_t better = 0;
    std::string detail;
    for (Metric m : kPerformanceMetrics) {
        const double gm =
            geometric_mean_ratio(serial, m, [&](const CampaignRow& row) { return arm.count(row.node) > 0; });
        better += gm < 1.0 ? 1 : 0;
        detail += (detail.empty() ? "" : " ") + to_string(m) + "=" + fmt(gm);
    }
    require(o, better >= 3, "peripheral better in " + std::to_string(better) + " of 4 metrics");
    note(o, std::to_string(arm_faults) + " arm faults, geometric-mean ratios " + detail + "; " +
                std::to_string(better) + " of 4 below 1; CSV identical across 1 and 8 jobs");
    return o;
}

// ============================================================================
// 9. Numerical robustness
// ============================================================================

Outcome robustness() {
    Outcome o;
    const Config cfg = config("four_node");
    double worst_halving = 0.0, worst_quad = 0.0;
    for (const Scenario& base : {cfg.scenario, constant_baseline(cfg.scenario)}) {
        Scenario fine = base;
        fine.integration.rtol /= 2.0;
        fine.integration.atol /= 2.0;
        const MetricsReport a = run_scenario(base).metrics;
        const MetricsReport b = run_scenario(fine).metrics;
        for (Metric m : kAllMetrics) {
            const double va = value(a, m), vb = value(b, m);
            const double rel = va == vb ? 0.0 : std::abs(va - vb) / std::max(std::abs(va), std::abs(vb));
            worst_halving = std::max(worst_halving, rel);
            require(o, rel < 1e-6, base.id + " " + to_string(m) + " changes by " + fmt(rel));
        }
        const std::array<double, kQuadCount> quad = {a.l2_freq, a.l2_rocof, a.e_rot, a.coherency};
        for (std::size_t k = 0; k < kQuadCount; ++k) {
            const double q = quad[k], t = a.trapezoid[k];
            const double rel = q == t ? 0.0 : std::abs(q - t) / std::max(std::abs(q), std::abs(t));
            worst_quad = std::max(worst_quad, rel);
            require(o, rel < 1e-4, base.id + " quadrature vs trapezoid " + std::to_string(k) + " " + fmt(rel));
        }
    }
    note(o, "max change on halving tolerances " + fmt(worst_halving) + ", max quadrature/trapezoid gap " +
                fmt(worst_quad));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"fixed points of 20 random grids", fixed_points},
        {"spectrum union on 50 all-VSG grids", spectrum_union},
        {"analytic oracles", analytic_oracles},
        {"deadband consistency", deadband_scaling},
        {"terminal synchronization at t=200 s", terminal_sync},
        {"alpha-beta sweep trends", sweep_trends},
        {"fault response with rearm", fault_response},
        {"peripheral vs homogeneous placement", placement},
        {"numerical robustness", robustness},
    };
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const long k = std::strtol(argv[i], nullptr, 10);
        if (k < 1 || k > static_cast<long>(criteria.size())) {
            std::cerr << "unknown criterion '" << argv[i] << "'\n";
            return 2;
        }
        selected.push_back(static_cast<std::size_t>(k));
    }
    if (selected.empty()) {
        for (std::size_t k = 1; k <= criteria.size(); ++k) selected.push_back(k);
    }

    bool all = true;
    for (std::size_t k : selected) {
        const auto& [name, run] = criteria[k - 1];
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.failures.push_back(std::string("error: ") + e.what());
        }
        all = all && out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << " [" << k << "] " << name << ": " << out.detail() << std::endl;
    }
    return all ? 0 : 1;
}
