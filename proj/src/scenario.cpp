#include "tsg/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace tsg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Accumulates field-path-qualified problems; loading reports them all.
struct Issues {
  std::vector<std::string> list;
  void add(const std::string& path, const std::string& msg) { list.push_back(path + ": " + msg); }
  [[noreturn]] void raise() const {
    std::ostringstream os;
    os << "scenario validation failed (" << list.size() << " problem(s)):";
    for (const auto& e : list) os << "\n  - " << e;
    throw Error(ErrorKind::validation, os.str());
  }
};

double get_num(const json& j, const char* key, const std::string& path, Issues& errs,
               std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    errs.add(path + "." + key, "required");
    return 0.0;
  }
  if (!j[key].is_number()) {
    errs.add(path + "." + key, "must be a number");
    return fallback.value_or(0.0);
  }
  return j[key].get<double>();
}

std::int64_t get_int(const json& j, const char* key, const std::string& path, Issues& errs,
                     std::optional<std::int64_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    errs.add(path + "." + key, "required");
    return 0;
  }
  if (!j[key].is_number_integer()) {
    errs.add(path + "." + key, "must be an integer");
    return fallback.value_or(0);
  }
  return j[key].get<std::int64_t>();
}

/// A time series is either a plain number (constant) or [[t, v], ...].
TimeSeries get_series(const json& j, const char* key, const std::string& path, Issues& errs,
                      std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return TimeSeries(*fallback);
    errs.add(path + "." + key, "required");
    return TimeSeries(0.0);
  }
  const json& v = j[key];
  if (v.is_number()) return TimeSeries(v.get<double>());
  if (v.is_array()) {
    std::vector<double> times, values;
    for (const auto& pair : v) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        errs.add(path + "." + key, "samples must be [t, value] pairs");
        return TimeSeries(0.0);
      }
      times.push_back(pair[0].get<double>());
      values.push_back(pair[1].get<double>());
    }
    try {
      return TimeSeries(std::move(times), std::move(values));
    } catch (const Error& e) {
      errs.add(path + "." + key, e.what());
      return TimeSeries(0.0);
    }
  }
  errs.add(path + "." + key, "must be a number or an array of [t, value] pairs");
  return TimeSeries(0.0);
}

FundamentalDiagram parse_diagram(const json& j, const std::string& path, Issues& errs) {
  FundamentalDiagram fd;
  if (!j.contains("diagram") || !j["diagram"].is_object()) {
    errs.add(path + ".diagram", "required object");
    return fd;
  }
  const json& d = j["diagram"];
  std::string family = d.value("family", "greenshields");
  double v_free = get_num(d, "v_free", path + ".diagram", errs);
  double rho_max = get_num(d, "rho_max", path + ".diagram", errs);
  try {
    if (family == "greenshields") return FundamentalDiagram::greenshields(v_free, rho_max);
    if (family == "triangular")
      return FundamentalDiagram::triangular(v_free, rho_max,
                                            get_num(d, "rho_crit", path + ".diagram", errs));
    errs.add(path + ".diagram.family", "unknown family '" + family + "'");
  } catch (const Error& e) {
    errs.add(path + ".diagram", e.what());
  }
  return fd;
}

Mat parse_matrix(const json& v, int rows, int cols, const std::string& path, Issues& errs) {
  Mat m(rows, cols);
  if (!v.is_array() || static_cast<int>(v.size()) != rows) {
    errs.add(path, "expected " + std::to_string(rows) + " rows");
    return m;
  }
  for (int r = 0; r < rows; ++r) {
    const auto& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      errs.add(path, "row " + std::to_string(r) + " needs " + std::to_string(cols) + " entries");
      return m;
    }
    for (int c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) {
        errs.add(path, "entry (" + std::to_string(r) + "," + std::to_string(c) + ") not a number");
        return m;
      }
      m.at(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::validation, "scenario " + path + ": " + e.what());
  }

  Issues errs;
  Scenario s;
  s.path = path;
  s.name = j.value("name", fs::path(path).stem().string());
  const fs::path base = fs::path(path).parent_path();

  // ---- network ----
  if (!j.contains("network") || !j["network"].is_object()) {
    errs.add("network", "required object");
    errs.raise();
  }
  const json& jn = j["network"];
  if (jn.contains("roads") && jn["roads"].is_array()) {
    int idx = 0;
    for (const auto& jr : jn["roads"]) {
      const std::string rp = "network.roads[" + std::to_string(idx++) + "]";
      int id = static_cast<int>(get_int(jr, "id", rp, errs));
      std::vector<Point> polyline;
      if (jr.contains("polyline") && jr["polyline"].is_array() && jr["polyline"].size() >= 2) {
        for (const auto& pt : jr["polyline"]) {
          if (pt.is_array() && pt.size() == 2 && pt[0].is_number() && pt[1].is_number())
            polyline.push_back({pt[0].get<double>(), pt[1].get<double>()});
          else
            errs.add(rp + ".polyline", "points must be [x, y]");
        }
      } else {
        errs.add(rp + ".polyline", "required array of at least two [x, y] points");
      }
      FundamentalDiagram fd = parse_diagram(jr, rp, errs);
      if (polyline.size() < 2) continue;
      Road road;
      try {
        road = Road::from_polyline(id, std::move(polyline), fd);
      } catch (const Error& e) {
        errs.add(rp, e.what());
        continue;
      }
      road.gamma = get_num(jr, "gamma", rp, errs, 0.0);
      road.eta = get_num(jr, "eta", rp, errs, 0.0);
      road.eps_density = get_num(jr, "eps_density", rp, errs, 0.0);
      if (jr.contains("rho0")) {
        TimeSeries prof = get_series(jr, "rho0", rp, errs, 0.0);
        road.rho0 = prof;
      }
      s.network.roads.push_back(std::move(road));
    }
  } else {
    errs.add("network.roads", "required array");
  }

  if (jn.contains("junctions") && jn["junctions"].is_array()) {
    int idx = 0;
    for (const auto& jj : jn["junctions"]) {
      const std::string jp = "network.junctions[" + std::to_string(idx++) + "]";
      Junction jc;
      jc.id = static_cast<int>(get_int(jj, "id", jp, errs));
      for (const char* key : {"incoming", "outgoing"}) {
        if (!jj.contains(key) || !jj[key].is_array()) {
          errs.add(jp + "." + key, "required array of road ids");
          continue;
        }
        for (const auto& v : jj[key]) {
          if (!v.is_number_integer()) {
            errs.add(jp + "." + key, "road ids must be integers");
            continue;
          }
          (std::string(key) == "incoming" ? jc.incoming : jc.outgoing)
              .push_back(v.get<int>());
        }
      }
      s.network.junctions.push_back(std::move(jc));
    }
  } else {
    errs.add("network.junctions", "required array");
  }

  if (jn.contains("inflows") && jn["inflows"].is_array()) {
    int idx = 0;
    for (const auto& jb : jn["inflows"]) {
      const std::string bp = "network.inflows[" + std::to_string(idx++) + "]";
      BoundaryInflow b;
      b.road = static_cast<int>(get_int(jb, "road", bp, errs));
      b.f_in = get_series(jb, "f_in", bp, errs);
      b.cap_in = get_num(jb, "cap_in", bp, errs);
      b.q0 = get_num(jb, "q0", bp, errs, 0.0);
      b.eps_queue = get_num(jb, "eps_queue", bp, errs, 0.0);
      b.lambda_q = get_num(jb, "lambda_q", bp, errs, 0.0);
      s.network.inflows.push_back(std::move(b));
    }
  }
  if (jn.contains("outflows") && jn["outflows"].is_array()) {
    int idx = 0;
    for (const auto& jb : jn["outflows"]) {
      const std::string bp = "network.outflows[" + std::to_string(idx++) + "]";
      BoundaryOutflow b;
      b.road = static_cast<int>(get_int(jb, "road", bp, errs));
      b.f_out = get_series(jb, "f_out", bp, errs);
      b.eps_out = get_num(jb, "eps_out", bp, errs);
      s.network.outflows.push_back(std::move(b));
    }
  }

  ValidationReport net_report = validate_network(s.network);
  for (const auto& issue : net_report.issues) errs.add("network." + issue.path, issue.message);

  // ---- mesh ----
  if (j.contains("mesh") && j["mesh"].is_string()) {
    fs::path mp = j["mesh"].get<std::string>();
    if (mp.is_relative()) mp = base / mp;
    s.mesh_path = mp.string();
    if (!fs::exists(mp)) {
      errs.add("mesh", "file not found: " + s.mesh_path);
    } else {
      try {
        s.mesh = load_mesh(s.mesh_path);
      } catch (const Error& e) {
        errs.add("mesh", e.what());
      }
    }
  } else {
    errs.add("mesh", "required path");
  }

  // ---- wind ----
  if (j.contains("wind") && j["wind"].is_object()) {
    const json& jw = j["wind"];
    try {
      if (jw.contains("uniform")) {
        std::vector<std::array<double, 3>> samples;
        for (const auto& smp : jw["uniform"]) {
          if (!smp.is_array() || smp.size() != 3) {
            errs.add("wind.uniform", "samples must be [t, vx, vy]");
            break;
          }
          samples.push_back({smp[0].get<double>(), smp[1].get<double>(), smp[2].get<double>()});
        }
        if (!samples.empty()) s.wind = WindField::uniform_series(samples);
      } else if (jw.value("zero", false)) {
        s.wind = WindField();
      } else {
        errs.add("wind", "expected {\"uniform\": [[t, vx, vy], ...]} or {\"zero\": true}");
      }
    } catch (const Error& e) {
      errs.add("wind", e.what());
    }
  }  // absent wind means zero wind

  // ---- pollution ----
  if (j.contains("pollution") && j["pollution"].is_object()) {
    const json& jp = j["pollution"];
    s.pollution.mu = get_num(jp, "mu", "pollution", errs, 3.5e-8);
    s.pollution.kappa = get_num(jp, "kappa", "pollution", errs, 6e-3);
    s.pollution.phi0_uniform = get_num(jp, "phi0", "pollution", errs, 0.0);
    try {
      s.pollution.check();
    } catch (const Error& e) {
      errs.add("pollution", e.what());
    }
  }

  // ---- discretization ----
  double dt = 4e-3, horizon = 24.0, target_ds = 0.2, cfl = 0.9;
  int substeps = 1;
  std::vector<int> explicit_cells;
  if (j.contains("discretization") && j["discretization"].is_object()) {
    const json& jd = j["discretization"];
    dt = get_num(jd, "dt", "discretization", errs);
    horizon = get_num(jd, "horizon", "discretization", errs);
    target_ds = get_num(jd, "target_ds", "discretization", errs, 0.2);
    cfl = get_num(jd, "cfl_safety", "discretization", errs, 0.9);
    substeps = static_cast<int>(get_int(jd, "substeps", "discretization", errs, 1));
    if (jd.contains("cells") && jd["cells"].is_array())
      for (const auto& c : jd["cells"]) explicit_cells.push_back(c.get<int>());
  } else {
    errs.add("discretization", "required object");
  }
  if (errs.list.empty()) {
    try {
      s.disc = Discretization::build(s.network, dt, horizon, target_ds, cfl, explicit_cells);
      s.disc.substeps = substeps;
    } catch (const Error& e) {
      errs.add("discretization", e.what());
    }
  }

  // ---- bounds and fixed controls ----
  if (j.contains("beta_bounds")) {
    const json& bb = j["beta_bounds"];
    if (bb.is_array() && bb.size() == 2 && bb[0].is_number() && bb[1].is_number()) {
      s.beta_lo = bb[0].get<double>();
      s.beta_hi = bb[1].get<double>();
    } else {
      errs.add("beta_bounds", "expected [lo, hi]");
    }
  }
  try {
    check_beta_bounds(s.network, s.beta_lo, s.beta_hi);
  } catch (const Error& e) {
    errs.add("beta_bounds", e.what());
  }

  s.fixed_controls = ControlSet::uniform(s.network, s.beta_lo, s.beta_hi);
  auto parse_controls = [&](const char* key, bool is_alpha) {
    if (!j.contains(key)) return;
    const json& jc = j[key];
    if (!jc.is_object()) {
      errs.add(key, "expected an object keyed by junction id");
      return;
    }
    for (const auto& [idstr, mat] : jc.items()) {
      int jid = std::atoi(idstr.c_str());
      int jidx = s.network.junction_index(jid);
      if (jidx < 0) {
        errs.add(std::string(key) + "." + idstr, "unknown junction id");
        continue;
      }
      const Junction& junction = s.network.junctions[static_cast<std::size_t>(jidx)];
      int n_in = static_cast<int>(junction.incoming.size());
      int n_out = static_cast<int>(junction.outgoing.size());
      Mat parsed = parse_matrix(mat, is_alpha ? n_out : n_in, is_alpha ? n_in : n_out,
                                std::string(key) + "." + idstr, errs);
      (is_alpha ? s.fixed_controls.alpha : s.fixed_controls.beta)[static_cast<std::size_t>(jidx)] =
          parsed;
    }
  };
  parse_controls("alpha", true);
  parse_controls("beta", false);
  for (const auto& violation : s.fixed_controls.check(s.network))
    errs.add("controls", violation);

  // ---- weights (from the network fields) ----
  s.weights = FunctionalWeights::from_network(s.network);

  // ---- optimizer configs ----
  if (j.contains("ga") && j["ga"].is_object()) {
    const json& jg = j["ga"];
    s.ga.population_size = static_cast<int>(get_int(jg, "population_size", "ga", errs, 50));
    s.ga.elite_count = static_cast<int>(get_int(jg, "elite_count", "ga", errs, 2));
    s.ga.crossover_fraction = get_num(jg, "crossover_fraction", "ga", errs, 0.8);
    s.ga.mutation_scale = get_num(jg, "mutation_scale", "ga", errs, 0.15);
    s.ga.stall_generations = static_cast<int>(get_int(jg, "stall_generations", "ga", errs, 12));
    s.ga.tol = get_num(jg, "tol", "ga", errs, 1e-4);
    s.ga.max_generations = static_cast<int>(get_int(jg, "max_generations", "ga", errs, 200));
  }
  try {
    s.ga.check();
  } catch (const Error& e) {
    errs.add("ga", e.what());
  }
  if (j.contains("local_search") && j["local_search"].is_object()) {
    const json& jl = j["local_search"];
    s.local_search.fd_step = get_num(jl, "fd_step", "local_search", errs, 1e-5);
    s.local_search.barrier_init = get_num(jl, "barrier_init", "local_search", errs, 1e-2);
    s.local_search.barrier_shrink = get_num(jl, "barrier_shrink", "local_search", errs, 0.1);
    s.local_search.max_iters = static_cast<int>(get_int(jl, "max_iters", "local_search", errs, 400));
    s.local_search.kkt_tol = get_num(jl, "kkt_tol", "local_search", errs, 1e-6);
  }
  try {
    s.local_search.check();
  } catch (const Error& e) {
    errs.add("local_search", e.what());
  }
  if (j.contains("follower") && j["follower"].is_object()) {
    const json& jf = j["follower"];
    s.follower.starts = static_cast<int>(get_int(jf, "starts", "follower", errs, 5));
    s.follower.ga_hybrid = jf.value("ga_hybrid", false);
    if (s.follower.starts < 1) errs.add("follower.starts", "must be >= 1");
  }
  s.follower.local = s.local_search;
  s.follower.ga = s.ga;

  s.seed = static_cast<std::uint64_t>(get_int(j, "seed", "scenario", errs, 0));
  s.out_dir = j.value("out_dir", std::string("out"));

  // ---- cross checks needing the full picture ----
  if (errs.list.empty()) {
    try {
      build_road_mesh_map(s.network, s.mesh, s.disc);
    } catch (const Error& e) {
      errs.add("mesh", e.what());
    }
  }

  if (!errs.list.empty()) errs.raise();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["mesh"] = s.mesh_path;
  j["seed"] = s.seed;
  j["out_dir"] = s.out_dir;
  j["beta_bounds"] = {s.beta_lo, s.beta_hi};
  j["discretization"] = {{"dt", s.disc.dt},
                         {"horizon", s.disc.horizon},
                         {"steps", s.disc.steps},
                         {"cfl_safety", s.disc.cfl_safety},
                         {"substeps", s.disc.substeps},
                         {"cells", s.disc.cells}};
  j["pollution"] = {{"mu", s.pollution.mu},
                    {"kappa", s.pollution.kappa},
                    {"phi0", s.pollution.phi0_uniform}};
  json roads = json::array();
  for (const Road& r : s.network.roads) {
    json jr;
    jr["id"] = r.id;
    json poly = json::array();
    for (const Point& p : r.polyline) poly.push_back({p[0], p[1]});
    jr["polyline"] = poly;
    jr["length"] = r.length;
    jr["gamma"] = r.gamma;
    jr["eta"] = r.eta;
    jr["eps_density"] = r.eps_density;
    roads.push_back(jr);
  }
  j["network"]["roads"] = roads;
  json junctions = json::array();
  for (const Junction& jc : s.network.junctions)
    junctions.push_back({{"id", jc.id}, {"incoming", jc.incoming}, {"outgoing", jc.outgoing}});
  j["network"]["junctions"] = junctions;
  json inflows = json::array();
  for (const BoundaryInflow& b : s.network.inflows)
    inflows.push_back({{"road", b.road},
                       {"cap_in", b.cap_in},
                       {"q0", b.q0},
                       {"eps_queue", b.eps_queue},
                       {"lambda_q", b.lambda_q}});
  j["network"]["inflows"] = inflows;
  json outflows = json::array();
  for (const BoundaryOutflow& b : s.network.outflows)
    outflows.push_back({{"road", b.road}, {"eps_out", b.eps_out}});
  j["network"]["outflows"] = outflows;
  return j.dump(2);
}

}  // namespace tsg
