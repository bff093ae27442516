#include "tsg/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace tsg {

namespace {

double segment_length(const Point& a, const Point& b) {
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

}  // namespace

Road Road::from_polyline(int id, std::vector<Point> polyline, FundamentalDiagram fd) {
  if (polyline.size() < 2) fail(ErrorKind::validation, "road polyline needs at least two points");
  Road r;
  r.id = id;
  r.polyline = std::move(polyline);
  r.fd = fd;
  r.cumulative_arclength.resize(r.polyline.size(), 0.0);
  for (std::size_t i = 1; i < r.polyline.size(); ++i) {
    double seg = segment_length(r.polyline[i - 1], r.polyline[i]);
    if (!(seg > 0.0)) fail(ErrorKind::validation, "road polyline has a zero-length segment");
    r.cumulative_arclength[i] = r.cumulative_arclength[i - 1] + seg;
  }
  r.length = r.cumulative_arclength.back();
  return r;
}

Point Road::position(double s) const {
  s = std::clamp(s, 0.0, length);
  auto it = std::upper_bound(cumulative_arclength.begin(), cumulative_arclength.end(), s);
  std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(it - cumulative_arclength.begin()), polyline.size() - 1);
  if (i == 0) return polyline.front();
  double s0 = cumulative_arclength[i - 1];
  double w = (s - s0) / (cumulative_arclength[i] - s0);
  return {polyline[i - 1][0] + w * (polyline[i][0] - polyline[i - 1][0]),
          polyline[i - 1][1] + w * (polyline[i][1] - polyline[i - 1][1])};
}

int Network::road_index(int id) const {
  for (std::size_t i = 0; i < roads.size(); ++i)
    if (roads[i].id == id) return static_cast<int>(i);
  return -1;
}

int Network::junction_index(int id) const {
  for (std::size_t i = 0; i < junctions.size(); ++i)
    if (junctions[i].id == id) return static_cast<int>(i);
  return -1;
}

const Road& Network::road_by_id(int id) const {
  int i = road_index(id);
  if (i < 0) fail(ErrorKind::validation, "unknown road id " + std::to_string(id));
  return roads[static_cast<std::size_t>(i)];
}

Attachment Network::start_attachment(int road_idx) const {
  const int id = roads[static_cast<std::size_t>(road_idx)].id;
  for (std::size_t j = 0; j < junctions.size(); ++j) {
    const auto& out = junctions[j].outgoing;
    auto it = std::find(out.begin(), out.end(), id);
    if (it != out.end())
      return {Attachment::Kind::junction, static_cast<int>(j), static_cast<int>(it - out.begin())};
  }
  for (std::size_t y = 0; y < inflows.size(); ++y)
    if (inflows[y].road == id) return {Attachment::Kind::boundary, static_cast<int>(y), 0};
  return {};
}

Attachment Network::end_attachment(int road_idx) const {
  const int id = roads[static_cast<std::size_t>(road_idx)].id;
  for (std::size_t j = 0; j < junctions.size(); ++j) {
    const auto& in = junctions[j].incoming;
    auto it = std::find(in.begin(), in.end(), id);
    if (it != in.end())
      return {Attachment::Kind::junction, static_cast<int>(j), static_cast<int>(it - in.begin())};
  }
  for (std::size_t z = 0; z < outflows.size(); ++z)
    if (outflows[z].road == id) return {Attachment::Kind::boundary, static_cast<int>(z), 0};
  return {};
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& issue : issues) os << issue.path << ": " << issue.message << "\n";
  return os.str();
}

ValidationReport validate_network(const Network& net) {
  ValidationReport rep;
  auto add = [&rep](std::string path, std::string msg) {
    rep.issues.push_back({std::move(path), std::move(msg)});
  };

  std::set<int> road_ids;
  for (std::size_t i = 0; i < net.roads.size(); ++i) {
    const Road& r = net.roads[i];
    const std::string path = "roads[" + std::to_string(i) + "]";
    if (!road_ids.insert(r.id).second) add(path, "duplicate road id " + std::to_string(r.id));
    if (r.polyline.size() < 2) {
      add(path, "polyline needs at least two points");
      continue;
    }
    double len = 0.0;
    for (std::size_t k = 1; k < r.polyline.size(); ++k)
      len += segment_length(r.polyline[k - 1], r.polyline[k]);
    if (!(len > 0.0))
      add(path, "zero length");
    else if (std::abs(len - r.length) > 1e-12 * std::max(1.0, len))
      add(path, "stored length disagrees with polyline arc length");
    try {
      r.fd.check();
    } catch (const Error& e) {
      add(path, e.what());
    }
    if (r.gamma < 0.0 || r.eta < 0.0) add(path, "emission factors must be nonnegative");
    if (r.eps_density < 0.0) add(path, "eps_density must be nonnegative");
    for (double v : r.rho0.values)
      if (!(v >= 0.0) || !(v <= r.fd.rho_max)) {
        add(path, "initial density outside [0, rho_max]");
        break;
      }
  }

  std::set<int> junction_ids;
  // A road may enter (resp. leave) at most one junction.
  std::map<int, int> incoming_count, outgoing_count;
  for (std::size_t j = 0; j < net.junctions.size(); ++j) {
    const Junction& jc = net.junctions[j];
    const std::string path = "junctions[" + std::to_string(j) + "]";
    if (!junction_ids.insert(jc.id).second)
      add(path, "duplicate junction id " + std::to_string(jc.id));
    if (jc.incoming.empty() || jc.outgoing.empty())
      add(path, "junction needs at least one incoming and one outgoing road");
    for (int id : jc.incoming) {
      if (net.road_index(id) < 0) add(path, "incoming references unknown road " + std::to_string(id));
      incoming_count[id]++;
    }
    for (int id : jc.outgoing) {
      if (net.road_index(id) < 0) add(path, "outgoing references unknown road " + std::to_string(id));
      outgoing_count[id]++;
    }
    std::set<int> in(jc.incoming.begin(), jc.incoming.end());
    if (in.size() != jc.incoming.size()) add(path, "repeated road in incoming list");
    std::set<int> out(jc.outgoing.begin(), jc.outgoing.end());
    if (out.size() != jc.outgoing.size()) add(path, "repeated road in outgoing list");
    for (int id : jc.incoming)
      if (out.count(id)) add(path, "road " + std::to_string(id) + " both incoming and outgoing");
  }
  for (auto [id, n] : incoming_count)
    if (n > 1) add("roads", "road " + std::to_string(id) + " multiply attached as incoming");
  for (auto [id, n] : outgoing_count)
    if (n > 1) add("roads", "road " + std::to_string(id) + " multiply attached as outgoing");

  std::map<int, int> inflow_count, outflow_count;
  for (std::size_t y = 0; y < net.inflows.size(); ++y) {
    const BoundaryInflow& b = net.inflows[y];
    const std::string path = "inflows[" + std::to_string(y) + "]";
    int ri = net.road_index(b.road);
    if (ri < 0) {
      add(path, "references unknown road " + std::to_string(b.road));
      continue;
    }
    inflow_count[b.road]++;
    if (b.q0 < 0.0) add(path, "initial queue must be nonnegative");
    if (b.eps_queue < 0.0) add(path, "eps_queue must be nonnegative");
    if (b.lambda_q < 0.0) add(path, "lambda_q must be nonnegative");
    if (b.f_in.min_value() < 0.0) add(path, "desired inflow must be nonnegative");
    if (b.cap_in > net.roads[static_cast<std::size_t>(ri)].fd.capacity() + 1e-12)
      add(path, "cap_in exceeds the road capacity");
  }
  for (std::size_t z = 0; z < net.outflows.size(); ++z) {
    const BoundaryOutflow& b = net.outflows[z];
    const std::string path = "outflows[" + std::to_string(z) + "]";
    if (net.road_index(b.road) < 0) {
      add(path, "references unknown road " + std::to_string(b.road));
      continue;
    }
    outflow_count[b.road]++;
    if (b.eps_out < 0.0) add(path, "eps_out must be nonnegative");
    if (b.f_out.min_value() < 0.0) add(path, "maximum outflow must be nonnegative");
  }

  // Every endpoint attaches exactly once.
  for (const Road& r : net.roads) {
    int starts = outgoing_count.count(r.id) ? outgoing_count[r.id] : 0;
    starts += inflow_count.count(r.id) ? inflow_count[r.id] : 0;
    int ends = incoming_count.count(r.id) ? incoming_count[r.id] : 0;
    ends += outflow_count.count(r.id) ? outflow_count[r.id] : 0;
    if (starts != 1)
      add("roads", "road " + std::to_string(r.id) + " start attached " + std::to_string(starts) +
                       " times (expected exactly one junction port or inflow)");
    if (ends != 1)
      add("roads", "road " + std::to_string(r.id) + " end attached " + std::to_string(ends) +
                       " times (expected exactly one junction port or outflow)");
  }

  return rep;
}

}  // namespace tsg
