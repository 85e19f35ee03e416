#pragma once

#include <nlohmann/json.hpp>

#include "hcycle/blender.hpp"
#include "hcycle/cycle.hpp"
#include "hcycle/hyperbolic.hpp"
#include "hcycle/rungefit.hpp"

namespace hc {

using json = nlohmann::ordered_json;

// Complex values are written as [re, im].
inline json cj(cplx z) { return json::array({z.real(), z.imag()}); }
inline json vj(const Vec3& v) { return json::array({cj(v[0]), cj(v[1]), cj(v[2])}); }

inline cplx read_cplx(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument("expected a number or [re, im]");
}

inline Vec3 read_vec3(const json& j) { return {read_cplx(j.at(0)), read_cplx(j.at(1)), read_cplx(j.at(2))}; }

inline json config_json(const ModelConfig& c) {
    return {{"eta", c.eta},
            {"lambda", c.lambda},
            {"b", cj(c.b)},
            {"eps", c.eps},
            {"zeta", c.zeta},
            {"omega", c.omega},
            {"bump_tol", c.bump_tol},
            {"mu_search_radius", c.mu_search_radius},
            {"delta_pert", c.delta_pert},
            {"p_degree", c.p_degree},
            {"q_degree", c.q_degree},
            {"bump_degree", c.bump_degree},
            {"degree_budget", c.degree_budget},
            {"samples_factor", c.samples_factor},
            {"chain_length", c.chain_length},
            {"newton_tol", c.newton_tol},
            {"seed", c.seed}};
}

// Unknown keys are rejected so that typos do not silently fall back to defaults.
inline ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k == "eta") c.eta = v.get<double>();
        else if (k == "lambda") c.lambda = v.get<double>();
        else if (k == "b") c.b = read_cplx(v);
        else if (k == "eps") c.eps = v.get<double>();
        else if (k == "zeta") c.zeta = v.get<double>();
        else if (k == "omega") c.omega = v.get<double>();
        else if (k == "bump_tol") c.bump_tol = v.get<double>();
        else if (k == "mu_search_radius") c.mu_search_radius = v.get<double>();
        else if (k == "delta_pert") c.delta_pert = v.get<double>();
        else if (k == "p_degree") c.p_degree = v.get<int>();
        else if (k == "q_degree") c.q_degree = v.get<int>();
        else if (k == "bump_degree") c.bump_degree = v.get<int>();
        else if (k == "degree_budget") c.degree_budget = v.get<int>();
        else if (k == "samples_factor") c.samples_factor = v.get<int>();
        else if (k == "chain_length") c.chain_length = v.get<int>();
        else if (k == "newton_tol") c.newton_tol = v.get<double>();
        else if (k == "seed") c.seed = v.get<std::uint64_t>();
        else throw std::invalid_argument("unknown config key '" + k + "'");
    }
    c.validate();
    return c;
}

inline void to_json(json& j, const FitReport& r) {
    json disks = json::array();
    for (std::size_t i = 0; i < r.disks.size(); ++i)
        disks.push_back({{"center", cj(r.disks[i].center)},
                         {"radius", r.disks[i].radius},
                         {"value_err", r.value_err[i]},
                         {"deriv_err", r.deriv_err[i]}});
    j = {{"name", r.name}, {"degree", r.degree}, {"tol", r.tol}, {"certified", r.certified}, {"disks", disks}};
}

inline void to_json(json& j, const SaddleData& s) {
    json ev = json::array(), orbit = json::array();
    for (cplx e : s.eigenvalues) ev.push_back({{"value", cj(e)}, {"modulus", std::abs(e)}});
    for (const Vec3& x : s.orbit) orbit.push_back(vj(x));
    j = {{"location", vj(s.location)}, {"period", s.period}, {"index", s.index}, {"residual", s.residual},
         {"eigenvalues", ev},          {"word", s.word},     {"orbit", orbit}};
}

inline void to_json(json& j, const ConeReport& r) {
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"name", p.name},
                         {"boxes", p.boxes},
                         {"unknown", p.unknown},
                         {"failed", p.failed},
                         {"deepest", p.deepest},
                         {"certified_fraction", p.certified_fraction},
                         {"certified", p.certified}});
    j = {{"certified", r.certified}, {"pairs", pairs}};
}

inline void to_json(json& j, const CrossingReport& r) {
    j = {{"winding", r.winding},
         {"full", r.full},
         {"max_abs_z_U", r.max_abs_z_U},
         {"max_abs_w_V", r.max_abs_w_V},
         {"transitions", r.transitions},
         {"ok", r.ok}};
}

inline void to_json(json& j, const SinkReport& r) {
    j = {{"invariance", verdict_name(r.invariance)},
         {"contraction", verdict_name(r.contraction)},
         {"max_image_radius", r.max_image_radius},
         {"h2_norm_bound", r.h2_norm_bound},
         {"boxes", r.boxes},
         {"sink", cj(r.sink)},
         {"multiplier", cj(r.multiplier)}};
}

inline void to_json(json& j, const CoveringReport& r) {
    j = {{"lhs", r.lhs},       {"middle", r.middle},     {"rhs", r.rhs}, {"points", r.points},
         {"failures", r.failures}, {"ok", r.ok}};
    if (r.witness) j["witness"] = cj(*r.witness);
}

inline void to_json(json& j, const BlenderTrace& t) {
    j = {{"itinerary", t.itinerary},
         {"diameters", t.t_diameters},
         {"point", vj(t.point)},
         {"parameter", cj(t.parameter)},
         {"orbit_check_depth", t.orbit_check_depth}};
}

inline void to_json(json& j, const DegreeReport& d) {
    j = {{"value", d.value}, {"bound", d.bound}, {"exact", d.exact}, {"overflow", d.overflow}};
}

inline void to_json(json& j, const CycleWitness& w) {
    j = {{"S", w.S},
         {"A", w.A},
         {"B", w.B},
         {"M1", vj(w.M1)},
         {"N1", vj(w.N1)},
         {"M2", vj(w.M2)},
         {"N2", vj(w.N2)},
         {"transverse_point", vj(w.transverse_point)},
         {"margin", w.margin},
         {"transverse_residual", w.transverse_residual},
         {"mu0", cj(w.mu0)},
         {"n_iterate", w.n_iterate},
         {"blender_trace", w.blender_trace},
         {"degree", w.degree},
         {"transverse_ok", w.transverse_ok},
         {"blender_ok", w.blender_ok},
         {"failures", w.failures}};
    if (w.cones) j["cones"] = *w.cones;
}

inline void to_json(json& j, const SweepReport& r) {
    j = {{"trials", r.trials},
         {"delta", r.delta},
         {"transverse_successes", r.transverse_successes},
         {"blender_successes", r.blender_successes},
         {"both", r.both},
         {"margins", r.margins},
         {"failures", r.failures}};
}

}  // namespace hc
