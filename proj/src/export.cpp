#include "tsg/export.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace tsg {

namespace {

struct File {
  std::FILE* f = nullptr;
  explicit File(const std::string& path, const char* mode) {
    f = std::fopen(path.c_str(), mode);
    if (!f) fail(ErrorKind::io, "cannot open " + path + " for writing");
  }
  ~File() {
    if (f) std::fclose(f);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

}  // namespace

void write_density_csv(const TrafficTrajectory& traj, const Network& net,
                       const Discretization& disc, const std::string& path) {
  File out(path, "w");
  std::fprintf(out.f, "n,t,road,cell,rho\n");
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const TrafficState& s = traj.states[n];
    for (std::size_t i = 0; i < net.roads.size(); ++i)
      for (std::size_t h = 0; h < s.rho[i].size(); ++h)
        std::fprintf(out.f, "%zu,%.17g,%d,%zu,%.17g\n", n, disc.time_at(static_cast<int>(n)),
                     net.roads[i].id, h, s.rho[i][h]);
  }
}

void write_queue_csv(const TrafficTrajectory& traj, const Network& net,
                     const Discretization& disc, const std::string& path) {
  File out(path, "w");
  std::fprintf(out.f, "n,t,inflow_road,q,flux\n");
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const TrafficState& s = traj.states[n];
    for (std::size_t y = 0; y < net.inflows.size(); ++y) {
      double flux = n < traj.inflow_flux.size() ? traj.inflow_flux[n][y] : 0.0;
      std::fprintf(out.f, "%zu,%.17g,%d,%.17g,%.17g\n", n, disc.time_at(static_cast<int>(n)),
                   net.inflows[y].road, s.q[y], flux);
    }
  }
}

void write_vtk_field(const TriMesh& mesh, const std::vector<double>& nodal,
                     const std::string& field_name, const std::string& path) {
  if (static_cast<int>(nodal.size()) != mesh.n_vertices())
    fail(ErrorKind::config, "vtk export: field size does not match the mesh");
  File out(path, "w");
  std::fprintf(out.f, "# vtk DataFile Version 3.0\n%s\nASCII\nDATASET UNSTRUCTURED_GRID\n",
               field_name.c_str());
  std::fprintf(out.f, "POINTS %d double\n", mesh.n_vertices());
  for (const Point& p : mesh.vertices) std::fprintf(out.f, "%.17g %.17g 0\n", p[0], p[1]);
  std::fprintf(out.f, "CELLS %d %d\n", mesh.n_triangles(), 4 * mesh.n_triangles());
  for (const auto& t : mesh.triangles) std::fprintf(out.f, "3 %d %d %d\n", t[0], t[1], t[2]);
  std::fprintf(out.f, "CELL_TYPES %d\n", mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) std::fprintf(out.f, "5\n");
  std::fprintf(out.f, "POINT_DATA %d\nSCALARS %s double 1\nLOOKUP_TABLE default\n",
               mesh.n_vertices(), field_name.c_str());
  for (double v : nodal) std::fprintf(out.f, "%.17g\n", v);
}

void write_vtk_series(const TriMesh& mesh, const ScalarFieldSeries& series,
                      const std::string& field_name, const std::string& dir,
                      const std::string& prefix, int stride) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  stride = std::max(1, stride);
  for (std::size_t n = 0; n < series.values.size(); n += static_cast<std::size_t>(stride)) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%05zu.vtk", prefix.c_str(), n);
    write_vtk_field(mesh, series.values[n], field_name, (fs::path(dir) / name).string());
  }
  write_vtk_field(mesh, series.time_average(), field_name + "_avg",
                  (fs::path(dir) / (prefix + "_time_avg.vtk")).string());
}

namespace {
constexpr std::uint64_t kCacheMagic = 0x74736761646a6f31ull;  // "tsgadjo1"
}

void save_adjoint_cache(const ScalarFieldSeries& g, std::uint64_t key, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write adjoint cache " + path);
  auto put_u64 = [&out](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  put_u64(kCacheMagic);
  put_u64(key);
  put_u64(static_cast<std::uint64_t>(g.values.size()));
  put_u64(g.values.empty() ? 0 : static_cast<std::uint64_t>(g.values.front().size()));
  out.write(reinterpret_cast<const char*>(&g.dt), sizeof g.dt);
  for (const auto& frame : g.values)
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size() * sizeof(double)));
}

bool load_adjoint_cache(ScalarFieldSeries& g, std::uint64_t key, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  auto get_u64 = [&in]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (get_u64() != kCacheMagic || get_u64() != key) return false;
  const std::uint64_t frames = get_u64();
  const std::uint64_t nv = get_u64();
  in.read(reinterpret_cast<char*>(&g.dt), sizeof g.dt);
  g.values.assign(frames, std::vector<double>(nv));
  for (auto& frame : g.values)
    in.read(reinterpret_cast<char*>(frame.data()),
            static_cast<std::streamsize>(nv * sizeof(double)));
  return static_cast<bool>(in);
}

std::uint64_t adjoint_cache_key(const TriMesh& mesh, const WindField& wind,
                                const PollutionParams& params, const Discretization& disc) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Point& p : mesh.vertices) {
    h = fnv1a(p[0], h);
    h = fnv1a(p[1], h);
  }
  for (const auto& t : mesh.triangles) h = fnv1a(t.data(), sizeof(int) * 3, h);
  h = fnv1a(params.mu, h);
  h = fnv1a(params.kappa, h);
  h = fnv1a(disc.dt, h);
  h = fnv1a(disc.horizon, h);
  h = fnv1a(static_cast<double>(disc.substeps), h);
  return Rng::mix(h, wind.hash());
}

}  // namespace tsg
