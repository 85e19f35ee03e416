// hcycle: runs the construction stages and writes a JSON report plus CSV data.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "report_json.hpp"

namespace fs = std::filesystem;
using namespace hc;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Fits {
    FitResult p, q;
    BumpSet bumps;
};

struct Cycle {
    Leg1 leg1;
    Leg2 leg2;
    MuSolution mu;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

class Csv {
public:
    Csv(const fs::path& p, const std::vector<std::string>& header) : out_(p) {
        if (!out_) throw std::runtime_error("cannot write " + p.string());
        out_.precision(17);
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    Csv& operator<<(double x) {
        out_ << (first_ ? "" : ",") << x;
        first_ = false;
        return *this;
    }
    Csv& operator<<(const std::string& s) {
        out_ << (first_ ? "" : ",") << s;
        first_ = false;
        return *this;
    }
    Csv& operator<<(cplx z) { return *this << z.real() << z.imag(); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    std::ofstream out_;
    bool first_ = true;
};

class Pipeline {
public:
    Pipeline(ModelConfig cfg, fs::path out, bool stable) : cfg_(cfg), out_(std::move(out)), stable_(stable) {}

    int trials = 20;
    double delta = 1e-6;

    void run(const std::string& name) {
        auto t0 = std::chrono::steady_clock::now();
        json r;
        try {
            if (name == "fit") r = fit_stage();
            else if (name == "verify-cones") r = cones_stage();
            else if (name == "verify-horseshoe") r = horseshoe_stage();
            else if (name == "verify-covering") r = covering_stage();
            else if (name == "blender") r = blender_stage();
            else if (name == "build-cycle") r = cycle_stage();
            else if (name == "sweep") r = sweep_stage();
            else throw std::invalid_argument("unknown stage " + name);
        } catch (const std::exception& e) {
            r = {{"pass", false}, {"error", e.what()}};
        }
        timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pass_ = pass_ && r.value("pass", false);
        stages_[name] = std::move(r);
    }

    bool pass() const { return pass_; }

    json report(const std::string& command) const {
        json j = {{"schema", "v1"}, {"command", command}, {"config", config_json(cfg_)}, {"stages", stages_}};
        j["plots"] = plots_;
        if (!stable_) j["timings"] = timings_;
        j["verdict"] = pass_ ? "pass" : "fail";
        return j;
    }

private:
    ModelConfig cfg_;
    fs::path out_;
    bool stable_;
    bool pass_ = true;
    json stages_ = json::object();
    json timings_ = json::object();
    std::vector<std::string> plots_;
    std::optional<Fits> fits_;
    std::optional<Cycle> cycle_;

    json config_key() const {
        json c = config_json(cfg_);
        c.erase("seed");
        return c;
    }

    fs::path plot(const std::string& name) {
        plots_.push_back(name);
        return out_ / name;
    }

    // ---------------------------------------------------------------- fits

    static json charts_json(const Poly1& p) {
        json a = json::array();
        for (const Chart& ch : p.charts()) a.push_back({cj(ch.center), ch.radius});
        return a;
    }

    static Poly1 load_poly(const fs::path& file, const json& charts) {
        Poly1 p = Poly1::from_text(slurp(file));
        for (const auto& c : charts) p.add_chart(read_cplx(c.at(0)), c.at(1).get<double>());
        return p;
    }

    static FitReport load_report(const json& j) {
        FitReport r;
        r.name = j.at("name");
        r.degree = j.at("degree");
        r.tol = j.at("tol");
        r.certified = j.at("certified");
        for (const auto& d : j.at("disks")) {
            r.disks.emplace_back(read_cplx(d.at("center")), d.at("radius").get<double>());
            r.value_err.push_back(d.at("value_err"));
            r.deriv_err.push_back(d.at("deriv_err"));
        }
        return r;
    }

    std::vector<std::pair<std::string, FitResult*>> fit_slots(Fits& f) {
        return {{"p", &f.p},
                {"q", &f.q},
                {"anchor", &f.bumps.anchor},
                {"fan", &f.bumps.fan},
                {"lift", &f.bumps.lift},
                {"land", &f.bumps.land}};
    }

    bool load_fits() {
        const fs::path dir = out_ / "fits";
        if (!fs::exists(dir / "fits.json")) return false;
        json meta = json::parse(slurp(dir / "fits.json"));
        if (meta.at("config") != config_key()) return false;
        Fits f;
        for (auto& [name, slot] : fit_slots(f)) {
            const json& e = meta.at("fits").at(name);
            *slot = {load_poly(dir / (name + ".txt"), e.at("charts")), load_report(e.at("report"))};
        }
        fits_ = std::move(f);
        return true;
    }

    void save_fits() {
        const fs::path dir = out_ / "fits";
        fs::create_directories(dir);
        json meta = {{"config", config_key()}, {"fits", json::object()}};
        for (auto& [name, slot] : fit_slots(*fits_)) {
            spit(dir / (name + ".txt"), slot->poly.to_text());
            meta["fits"][name] = {{"report", slot->report}, {"charts", charts_json(slot->poly)}};
        }
        spit(dir / "fits.json", meta.dump(1) + "\n");
    }

    const Fits& fits() {
        if (!fits_ && !load_fits()) {
            Fits f{make_p(cfg_), make_q(cfg_), make_bumps(cfg_)};
            fits_ = std::move(f);
            save_fits();
        }
        return *fits_;
    }

    Automorphism3 F1() { return build_F1(fits().p.poly, fits().q.poly, cfg_); }

    // --------------------------------------------------------------- cycle

    const Cycle& cycle() {
        if (cycle_) return *cycle_;
        const Fits& f = fits();
        Cycle c;
        c.leg1 = build_F2(F1(), f.bumps, cfg_);
        c.leg2 = prepare_leg2(c.leg1.F2, cfg_);
        const fs::path cache = out_ / "cycle.json";
        bool cached = false;
        if (fs::exists(cache)) {
            json j = json::parse(slurp(cache));
            if (j.at("config") == config_key()) {
                c.mu = evaluate_mu(c.leg1.F2, f.bumps, c.leg2, read_cplx(j.at("mu0")), cfg_);
                c.mu.winding = j.at("winding");
                c.mu.slope_error = j.at("slope_error");
                cached = true;
            }
        }
        if (!cached) {
            c.mu = solve_mu(c.leg1.F2, f.bumps, c.leg2, cfg_);
            json j = {{"config", config_key()},
                      {"mu0", cj(c.mu.mu0)},
                      {"winding", c.mu.winding},
                      {"slope_error", c.mu.slope_error}};
            spit(cache, j.dump(1) + "\n");
        }
        cycle_ = std::move(c);
        return *cycle_;
    }

    CycleSeeds seeds() {
        const Cycle& c = cycle();
        SaddleData S3 = newton_fixed(c.mu.F3, c.leg2.S2.location, 1);
        return {S3.location, c.leg1.A.location, c.mu.B3.orbit, c.mu.B3.word, c.leg1.anchor, c.mu.s_N};
    }

    // -------------------------------------------------------------- stages

    json fit_stage() {
        const Fits& f = fits();
        json fj = json::object();
        bool ok = true;
        Csv csv(plot("fit_errors.csv"), {"fit", "center_re", "center_im", "radius", "value_err", "deriv_err"});
        for (auto& [name, slot] : fit_slots(*fits_)) {
            const FitReport& r = slot->report;
            fj[name] = r;
            ok = ok && r.certified;
            for (std::size_t i = 0; i < r.disks.size(); ++i) {
                csv << name << r.disks[i].center << r.disks[i].radius << r.value_err[i] << r.deriv_err[i];
                csv.end_row();
            }
        }
        cplx zs = poly_fixed_point(f.p.poly, 3.0);
        cplx mult = f.p.poly.deriv(zs);
        bool fixed_ok = std::abs(zs - 3.0) <= 1e-3 && std::abs(mult - cfg_.eta) <= 1e-3;
        return {{"fits", fj},
                {"p_fixed_point", cj(zs)},
                {"p_multiplier", cj(mult)},
                {"pass", ok && fixed_ok}};
    }

    json cones_stage() {
        const Fits& f = fits();
        auto branches = default_branches(cfg_);
        Automorphism3 H = henon_factor(f.p.poly, cfg_.b);
        ConeReport h = verify_cones(H, branches, henon_cone_pairs(), 8, true);
        const Cycle& c = cycle();
        json maps = json::object();
        bool ok = h.certified;
        long boxes = 0;
        for (const auto& p : h.pairs) boxes += p.boxes + p.unknown + p.failed;
        for (auto [name, F] : {std::pair<const char*, Automorphism3>{"F1", F1()}, {"F2", c.leg1.F2}, {"F3", c.mu.F3}}) {
            ConeReport r = verify_cones(F, branches, skew_cone_pairs(cfg_), 8);
            for (const auto& p : r.pairs) boxes += p.boxes + p.unknown + p.failed;
            ok = ok && r.certified;
            maps[name] = r;
        }
        SinkReport sink = verify_sink_basin(f.p.poly, cfg_.b, 64);
        bool sink_ok = sink.invariance == Verdict::yes && sink.contraction == Verdict::yes;
        return {{"H", h}, {"maps", maps}, {"total_boxes", boxes}, {"sink", sink}, {"pass", ok && sink_ok && boxes <= 1000000}};
    }

    json horseshoe_stage() {
        const Fits& f = fits();
        Automorphism3 F = F1();
        SaddleData S = newton_fixed(F, {3.0, 3.0, 3.0}, 1);
        SaddleData A = newton_fixed(F, {0.25, 0.25, -0.9}, 1);
        A.word = {0};
        CrossingReport cr = verify_crossing(f.p.poly, cfg_.b, cfg_);
        const cplx s_model[3] = {3.0, 3.0, 3.0};
        double s_dist = 0.0, a_dist = 0.0;
        for (int i = 0; i < 3; ++i) s_dist = std::max(s_dist, std::abs(S.location[i] - s_model[i]));
        const cplx a_model[3] = {0.25, 0.25, -0.9};
        for (int i = 0; i < 3; ++i) a_dist = std::max(a_dist, std::abs(A.location[i] - a_model[i]));
        bool s_ok = s_dist <= 0.05 && S.index == 1 && std::abs(S.eigenvalues[0]) <= 1e-3 &&
                    std::abs(S.eigenvalues[1]) <= 1e-3 && std::abs(std::abs(S.eigenvalues[2]) - cfg_.lambda) <= 1e-2;
        bool a_ok = a_dist <= 1e-3 && A.index == 2;

        // Period-4 points of the base horseshoe.
        Csv csv(plot("horseshoe_slice.csv"), {"word", "z_re", "z_im", "w_re", "w_im"});
        for (int code = 0; code < 256; ++code) {
            std::vector<int> word{code & 3, (code >> 2) & 3, (code >> 4) & 3, (code >> 6) & 3};
            HorseshoeOrbit o = horseshoe_orbit(f.p.poly, cfg_.b, word, true);
            csv << double(code) << o.z[0] << o.w0;
            csv.end_row();
        }
        write_patch("manifold_Ws_S.csv", stable_surface_S(F, S));
        write_patch("manifold_Wu_A.csv", unstable_surface_K(F, {0}, cfg_));
        return {{"S", S},
                {"A", A},
                {"S_distance", s_dist},
                {"A_distance", a_dist},
                {"crossing", cr},
                {"pass", s_ok && a_ok && cr.ok}};
    }

    void write_patch(const std::string& name, const GraphPatch& g) {
        Csv csv(plot(name), {"z_re", "z_im", "w_re", "w_im", "t_re", "t_im"});
        for (const Vec3& x : g.samples) {
            csv << x[0] << x[1] << x[2];
            csv.end_row();
        }
    }

    json covering_stage() {
        CoveringReport r = verify_covering(100);
        return {{"covering", r}, {"pass", r.ok}};
    }

    void write_trace(const std::string& prefix, const BlenderTrace& tr) {
        for (std::size_t k = 0; k < tr.curves.size(); ++k) {
            Csv csv(plot(prefix + "_step" + std::to_string(k) + ".csv"),
                    {"z_re", "z_im", "c2_re", "c2_im", "c3_re", "c3_im"});
            for (int m = 0; m < UUCurve::samples; ++m) {
                csv << UUCurve::root(m) << tr.curves[k].s2[m] << tr.curves[k].s3[m];
                csv.end_row();
            }
        }
        Csv d(plot(prefix + "_diameters.csv"), {"step", "diameter"});
        for (std::size_t k = 0; k < tr.t_diameters.size(); ++k) {
            d << double(k + 1) << tr.t_diameters[k];
            d.end_row();
        }
    }

    json blender_stage() {
        Automorphism3 F = F1();
        std::mt19937_64 rng(cfg_.seed);
        int ok = 0, max_steps = 0;
        double worst = 0.0;
        json failures = json::array();
        for (int i = 0; i < 100; ++i) {
            UUCurve c = random_uu_curve(rng);
            try {
                BlenderTrace tr = intersect_stable(F, c, 6, 1e-10, cfg_);
                bool dec = std::is_sorted(tr.t_diameters.rbegin(), tr.t_diameters.rend()) &&
                           std::adjacent_find(tr.t_diameters.begin(), tr.t_diameters.end()) == tr.t_diameters.end();
                if (!dec) throw std::runtime_error("diameters not strictly decreasing");
                if (i == 0) write_trace("blender", tr);
                ++ok;
                max_steps = std::max<int>(max_steps, tr.itinerary.size());
                worst = std::max(worst, tr.t_diameters.back());
            } catch (const std::exception& e) {
                failures.push_back({{"trial", i}, {"error", e.what()}});
            }
        }
        return {{"curves", 100},
                {"successes", ok},
                {"max_steps", max_steps},
                {"max_final_diameter", worst},
                {"failures", failures},
                {"pass", ok == 100 && max_steps <= 6}};
    }

    json cycle_stage() {
        const Cycle& c = cycle();
        CycleWitness w = verify_cycle(c.mu.F3, seeds(), cfg_, true);
        w.M1 = c.leg1.M1;
        w.N1 = c.leg1.N1;
        w.M2 = c.leg2.M2;
        w.N2 = c.leg2.N2;
        w.mu0 = c.mu.mu0;

        // Leg 1 on F2 itself.
        TransverseResult t2 = transverse_leg(c.leg1.F2, c.leg1.S, c.leg1.anchor, cfg_);
        double t2_dist = std::max({std::abs(t2.point[0] - 3.9), std::abs(t2.point[1] - 3.9), std::abs(t2.point[2] - 3.0)});
        bool leg1_ok = t2.residual <= 1e-10 && t2.margin >= 1e-3 && t2_dist <= 0.1;
        bool mu_ok = std::abs(c.mu.mu0) < cfg_.mu_search_radius && c.mu.gap <= 1e-10 && c.mu.tangent_error <= 0.1 &&
                     c.mu.winding == 1;
        bool uu_ok = w.blender_ok && w.n_iterate <= 10 * w.B.period;

        write_patch("manifold_Ws_B.csv", stable_curve_K(c.mu.F3, {}, w.B));
        if (w.blender_ok) write_trace("cycle_blender", w.blender_trace);

        json leg1 = {{"point", vj(t2.point)},
                     {"source", vj(t2.source)},
                     {"distance_to_model", t2_dist},
                     {"margin", t2.margin},
                     {"residual", t2.residual},
                     {"pass", leg1_ok}};
        json mu = {{"mu0", cj(c.mu.mu0)},
                   {"gap", c.mu.gap},
                   {"slope_error", c.mu.slope_error},
                   {"winding", c.mu.winding},
                   {"tangent", vj(c.mu.tangent)},
                   {"tangent_error", c.mu.tangent_error},
                   {"pass", mu_ok}};
        return {{"leg1", leg1},
                {"mu", mu},
                {"witness", w},
                {"degree", w.degree.value},
                {"pass", leg1_ok && mu_ok && uu_ok && w.failures.empty() && w.both_legs()}};
    }

    json sweep_stage() {
        const Cycle& c = cycle();
        CycleSeeds s = seeds();
        // delta = 0 must reproduce the unperturbed witness exactly.
        std::string base = json(verify_cycle(c.mu.F3, s, cfg_, false)).dump();
        std::string zero = json(verify_cycle(perturb(c.mu.F3, 0.0, cfg_.seed), s, cfg_, false)).dump();
        SweepReport r = sweep(c.mu.F3, s, delta, trials, cfg_.seed, cfg_);
        Csv csv(plot("sweep_margins.csv"), {"trial", "margin"});
        for (std::size_t i = 0; i < r.margins.size(); ++i) {
            csv << double(i) << r.margins[i];
            csv.end_row();
        }
        bool identical = base == zero;
        return {{"sweep", r}, {"zero_delta_identical", identical}, {"pass", r.both == r.trials && identical}};
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust heterodimensional cycle construction and verification"};
    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    int trials = 20;
    std::optional<double> delta;
    bool stable = false;
    app.add_option("--config", config_path, "JSON config file with ModelConfig fields");
    app.add_option("--out", out_dir, "output directory (report, CSV data, cached fits)");
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--trials", trials, "sweep trials")->check(CLI::PositiveNumber);
    app.add_option("--delta", delta, "sweep perturbation size (default: delta_pert)")->check(CLI::NonNegativeNumber);
    app.add_flag("--stable-output", stable, "omit timings so reports are byte-reproducible");
    const std::vector<std::string> commands{"fit",   "verify-cones", "verify-horseshoe", "verify-covering",
                                            "blender", "build-cycle", "sweep",           "all"};
    for (const auto& c : commands) app.add_subcommand(c)->fallthrough();
    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    ModelConfig cfg;
    try {
        if (!config_path.empty()) {
            if (!fs::exists(config_path)) throw ConfigError("config file not found: " + config_path);
            cfg = config_from_json(json::parse(slurp(config_path)));
        }
        if (seed) cfg.seed = *seed;
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    Pipeline pipe(cfg, out_dir, stable);
    pipe.trials = trials;
    pipe.delta = delta.value_or(cfg.delta_pert);
    std::vector<std::string> stages;
    if (command == "all")
        stages = {"fit", "verify-covering", "verify-horseshoe", "verify-cones", "blender", "build-cycle", "sweep"};
    else
        stages = {command};
    for (const auto& s : stages) {
        pipe.run(s);
    }
    json rep = pipe.report(command);
    try {
        spit(fs::path(out_dir) / ("report_" + command + ".json"), rep.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    for (const auto& [name, st] : rep["stages"].items())
        std::cout << name << ": " << (st.value("pass", false) ? "pass" : "FAIL")
                  << (st.contains("error") ? " (" + st["error"].get<std::string>() + ")" : "") << '\n';
    std::cout << "verdict: " << rep["verdict"].get<std::string>() << '\n';
    return pipe.pass() ? 0 : 1;
}
