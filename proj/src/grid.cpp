#include "fracpass/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fracpass/version.hpp"

namespace fracpass {

namespace {

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

std::size_t pow_int(int m, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(m);
  return r;
}

}  // namespace

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec.N < 1 || spec.N > 3)
    throw ConfigError("grid.N must be 1, 2 or 3 (got " + std::to_string(spec.N) + ")");
  if (!(spec.L > 0.0))
    throw ConfigError("grid.L must be positive");
  if (spec.M < 8 || !power_of_two(spec.M))
    throw ConfigError("grid.M must be a power of two >= 8 (got " + std::to_string(spec.M) + ")");
  h_ = 2.0 * spec.L / spec.M;
  w_ = std::pow(h_, spec.N);
  size_ = pow_int(spec.M, spec.N);
  axis_.resize(spec.M);
  for (int i = 0; i < spec.M; ++i) axis_[i] = -spec.L + (i + 0.5) * h_;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = spec_.N - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % spec_.M);
    flat /= spec_.M;
  }
  return idx;
}

std::array<double, 3> Grid::point(std::size_t flat) const {
  auto idx = unflatten(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < spec_.N; ++a) x[a] = axis_[idx[a]];
  return x;
}

double Grid::r2(std::size_t flat, const std::array<double, 3>& x0) const {
  auto x = point(flat);
  double acc = 0.0;
  for (int a = 0; a < spec_.N; ++a) {
    double d = x[a] - x0[a];
    acc += d * d;
  }
  return acc;
}

Grid make_grid(const GridSpec& spec) { return Grid(spec); }

Field zero_field(const Grid& grid) {
  return Field{grid.spec(), std::vector<double>(grid.size(), 0.0)};
}

Field sample_field(const Grid& grid,
                   const std::function<double(const std::array<double, 3>&, int N)>& f) {
  Field out = zero_field(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = f(grid.point(i), grid.N());
    if (!std::isfinite(v)) {
      auto x = grid.point(i);
      std::ostringstream msg;
      msg << "sample_field: non-finite value at node " << i << " (x = " << x[0];
      for (int a = 1; a < grid.N(); ++a) msg << ", " << x[a];
      msg << ")";
      throw ConfigError(msg.str());
    }
    out.values[i] = v;
  }
  return out;
}

double integrate(const Field& u) {
  const double w = std::pow(2.0 * u.spec.L / u.spec.M, u.spec.N);
  double acc = 0.0;
  for (double v : u.values) acc += v;
  return w * acc;
}

double lp_norm(const Field& u, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
  const double w = std::pow(2.0 * u.spec.L / u.spec.M, u.spec.N);
  double acc = 0.0;
  for (double v : u.values) acc += std::pow(std::abs(v), p);
  return std::pow(w * acc, 1.0 / p);
}

double l2_norm(const Field& u) {
  const double w = std::pow(2.0 * u.spec.L / u.spec.M, u.spec.N);
  double acc = 0.0;
  for (double v : u.values) acc += v * v;
  return std::sqrt(w * acc);
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.spec == b.spec))
    throw ConfigError(std::string(where) + ": fields live on different grids");
}

void write_field_file(const std::string& path, const Field& u) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open field file for writing: " + path);
  out << kFieldFormatTag << " N=" << u.spec.N << " L=";
  {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", u.spec.L);
    out << buf;
  }
  out << " M=" << u.spec.M << "\n";
  char buf[40];
  for (double v : u.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << "\n";
  }
}

Field read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("field file is empty: " + path);
  std::istringstream hdr(line);
  std::string tag, ver, nkv, lkv, mkv;
  hdr >> tag >> ver >> nkv >> lkv >> mkv;
  if (tag + " " + ver != kFieldFormatTag)
    throw ConfigError("unrecognized field file header: " + line);
  auto kv_value = [&](const std::string& kv, const char* key) -> std::string {
    std::string prefix = std::string(key) + "=";
    if (kv.rfind(prefix, 0) != 0)
      throw ConfigError("malformed field header token '" + kv + "' in " + path);
    return kv.substr(prefix.size());
  };
  GridSpec spec;
  spec.N = std::stoi(kv_value(nkv, "N"));
  spec.L = std::stod(kv_value(lkv, "L"));
  spec.M = std::stoi(kv_value(mkv, "M"));
  Grid grid = make_grid(spec);  // validates shape
  Field u{spec, {}};
  u.values.reserve(grid.size());
  double v;
  while (in >> v) u.values.push_back(v);
  if (u.values.size() != grid.size())
    throw ConfigError("field file has " + std::to_string(u.values.size()) + " values, expected " +
                      std::to_string(grid.size()) + ": " + path);
  return u;
}

}  // namespace fracpass
