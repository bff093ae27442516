#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tsg/common.hpp"
#include "tsg/fundamental_diagram.hpp"

namespace tsg {

using Point = std::array<double, 2>;  // km

/// Unidirectional avenue. The polyline fixes the geometry and the sense of
/// motion; the stored parametrization is arc length, so a position s in
/// [0, length] maps onto the polyline at unit speed.
struct Road {
  int id = 0;
  std::vector<Point> polyline;
  double length = 0.0;                       // km, sum of segment lengths
  std::vector<double> cumulative_arclength;  // per polyline vertex
  FundamentalDiagram fd;
  double gamma = 0.0;        // emission per flow, kg/(vehicle km)
  double eta = 0.0;          // emission per density, kg/(vehicle h)
  double eps_density = 0.0;  // travel-cost weight for this road
  TimeSeries rho0{0.0};      // initial density profile over s, vehicles/km

  /// Builds arc-length data from the polyline.
  static Road from_polyline(int id, std::vector<Point> polyline, FundamentalDiagram fd);

  Point position(double s) const;  // point at arc length s
  Point start() const { return polyline.front(); }
  Point end() const { return polyline.back(); }
};

struct Junction {
  int id = 0;
  std::vector<int> incoming;  // road ids ending here; order fixes matrix rows/cols
  std::vector<int> outgoing;  // road ids starting here
};

/// Network entry: vehicles wanting in accumulate in a point queue.
struct BoundaryInflow {
  int road = 0;           // road id whose start lies on the boundary
  TimeSeries f_in{0.0};   // desired inflow rate, vehicles/h
  double cap_in = 0.0;    // downstream capacity bound on the queue discharge
  double q0 = 0.0;        // initial queue, vehicles
  double eps_queue = 0.0; // travel-cost weight of the queue
  double lambda_q = 0.0;  // queue emission rate, kg/(vehicle h)
};

struct BoundaryOutflow {
  int road = 0;           // road id whose end lies on the boundary
  TimeSeries f_out{0.0};  // maximum outflow rate, vehicles/h
  double eps_out = 0.0;   // travel-cost reward weight for realized outflow
};

/// Where a road endpoint is attached. Valid networks attach every endpoint
/// exactly once (either a junction port or a boundary descriptor).
struct Attachment {
  enum class Kind { junction, boundary } kind = Kind::boundary;
  int index = -1;  // junction index or boundary descriptor index
  int slot = -1;   // position within the junction's incoming/outgoing list
};

struct ValidationIssue {
  std::string path;     // e.g. "roads[3]" or "junctions[1].incoming"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

struct Network {
  std::vector<Road> roads;
  std::vector<Junction> junctions;
  std::vector<BoundaryInflow> inflows;
  std::vector<BoundaryOutflow> outflows;

  int road_index(int id) const;      // -1 when unknown
  int junction_index(int id) const;
  const Road& road_by_id(int id) const;

  /// Endpoint attachments, computed from the topology. Only meaningful on
  /// networks that passed validation.
  Attachment start_attachment(int road_idx) const;
  Attachment end_attachment(int road_idx) const;
};

/// Structural and range checks for every network invariant. Reports all
/// violations instead of throwing.
ValidationReport validate_network(const Network& net);

}  // namespace tsg
