#include "basinlab/io.hpp"

#include <fstream>

namespace basinlab {

namespace {

Json pair(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx as_cplx(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::ParseError, "expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class F>
auto guarded(F&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

Json to_json(const MarkedPolynomial& f) {
  Json cps = Json::array();
  for (cplx c : f.critical_points()) cps.push_back(pair(c));
  return {{"degree", f.degree()}, {"critical_points", cps}, {"origin_image", pair(f.origin_image())}};
}

MarkedPolynomial polynomial_from_json(const Json& j) {
  return guarded([&] {
    const int degree = j.at("degree").get<int>();
    if (degree == 1) return MarkedPolynomial::linear(as_cplx(j.at("origin_image")));
    std::vector<cplx> cps;
    for (const Json& c : j.at("critical_points")) cps.push_back(as_cplx(c));
    if (static_cast<int>(cps.size()) != degree - 1)
      throw Error(ErrorCode::ParseError, "critical point count does not match degree");
    return MarkedPolynomial::from_critical_data(std::move(cps), as_cplx(j.at("origin_image")));
  });
}

Json to_json(const LocalModelSurface& base) {
  Json poles = Json::array();
  for (cplx q : base.poles) poles.push_back(pair(q));
  return {{"poles", poles},
          {"residues", base.residues},
          {"heights", {base.band_low, base.central_height, base.band_high}},
          {"slits", base.slit_angles},
          {"sigma", base.slit_permutation},
          {"central_leaf_singular", base.central_leaf_singular}};
}

Json to_json(const PointedLocalModelMap& lm) {
  Json j{{"base", to_json(lm.base)},
         {"degree", lm.degree},
         {"representative", to_json(lm.representative)},
         {"marked_angle", lm.marked_angle},
         {"critical_value_angles", lm.critical_value_angles}};
  if (lm.source) {
    j["source"] = {{"height", lm.source->height},
                   {"domain_point", pair(lm.source->domain_point)},
                   {"base_point", pair(lm.source->base_point)},
                   {"base_angle", lm.source->base_angle},
                   {"component_length", lm.source->component_length},
                   {"base_length", lm.source->base_length}};
  }
  return j;
}

LocalModelSurface surface_from_json(const Json& j) {
  return guarded([&] {
    LocalModelSurface s;
    const Json& h = j.at("heights");
    s.band_low = h.at(0).get<double>();
    s.central_height = h.at(1).get<double>();
    s.band_high = h.at(2).get<double>();
    for (const Json& q : j.at("poles")) s.poles.push_back(as_cplx(q));
    s.residues = j.at("residues").get<std::vector<double>>();
    s.slit_angles = j.value("slits", std::vector<double>{});
    s.slit_permutation = j.value("sigma", std::vector<int>{});
    s.central_leaf_singular = j.value("central_leaf_singular", false);
    validate(s);
    return s;
  });
}

PointedLocalModelMap local_model_from_json(const Json& j) {
  return guarded([&] {
    PointedLocalModelMap lm;
    lm.base = surface_from_json(j.at("base"));
    lm.degree = j.at("degree").get<int>();
    lm.representative = polynomial_from_json(j.at("representative"));
    lm.marked_angle = j.value("marked_angle", 0.0);
    lm.critical_value_angles = j.value("critical_value_angles", std::vector<double>{});
    if (lm.representative.degree() != lm.degree) throw Error(ErrorCode::ParseError, "representative degree mismatch");
    return lm;
  });
}

Json to_json(const LiftedPath& path) {
  Json steps = Json::array();
  for (const LiftStep& s : path.steps)
    steps.push_back({{"s", s.s}, {"polynomial", to_json(s.poly)}, {"residual", s.residual}});
  return {{"status", to_string(path.status)},
          {"status_s", path.status_s},
          {"branch_parameters", path.branch_parameters},
          {"steps", steps}};
}

Json to_json(const DeformationPath& path) {
  Json steps = Json::array();
  for (const DeformationStep& s : path.steps)
    steps.push_back({{"h", s.h},
                     {"polynomial", to_json(s.poly)},
                     {"min_critical_height", s.min_critical_height},
                     {"residual", s.residual},
                     {"epsilon", s.epsilon}});
  Json events = Json::array();
  for (const BranchEvent& e : path.branch_events)
    events.push_back({{"height", e.height},
                      {"zero", pair(e.zero_of_omega)},
                      {"candidates", e.candidate_rays},
                      {"chosen", e.chosen_ray},
                      {"policy", to_string(e.policy)}});
  return {{"steps", steps}, {"branch_events", events}};
}

Json to_json(const ConjugacyReport& report) {
  Json samples = Json::array();
  for (const CorrespondencePair& p : report.samples)
    samples.push_back({{"f", pair(p.in_f)}, {"g", pair(p.in_g)}, {"distortion", p.distortion}});
  return {{"epsilon", report.epsilon},
          {"rotation_index", report.rotation_index},
          {"verdict", to_string(report.verdict)},
          {"coverage", report.coverage},
          {"distortion", report.distortion},
          {"defect", report.defect},
          {"samples", samples}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace basinlab
