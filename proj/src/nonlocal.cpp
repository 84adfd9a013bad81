#include "fracpass/nonlocal.hpp"

#include <cmath>
#include <thread>

namespace fracpass {

namespace {

std::vector<int> padded_dims(const Grid& g) {
  return std::vector<int>(static_cast<std::size_t>(g.N()), 2 * g.M());
}

std::vector<int> box_dims(const Grid& g) {
  return std::vector<int>(static_cast<std::size_t>(g.N()), g.M());
}

/// Flat offset of multi-index (i0,..) in the in-place r2c padded layout.
struct PaddedLayout {
  int N;
  int n;            // logical extent per axis
  std::size_t rs;   // padded stride of the last axis

  explicit PaddedLayout(const RealDft& dft)
      : N(static_cast<int>(dft.dims().size())), n(dft.dims()[0]), rs(dft.padded_last()) {}

  std::size_t at(int i0, int i1, int i2) const {
    switch (N) {
      case 1: return static_cast<std::size_t>(i0);
      case 2: return static_cast<std::size_t>(i0) * rs + static_cast<std::size_t>(i1);
      default:
        return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(i1)) * rs + static_cast<std::size_t>(i2);
    }
  }
};

/// Copy box values into (the box corner of) a padded-layout buffer.
void scatter_box(const Grid& g, const double* box, const RealDft& dft, double* out) {
  PaddedLayout lay(dft);
  const int M = g.M();
  std::size_t src = 0;
  switch (g.N()) {
    case 1:
      for (int i = 0; i < M; ++i) out[lay.at(i, 0, 0)] = box[src++];
      break;
    case 2:
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) out[lay.at(a, b, 0)] = box[src++];
      break;
    default:
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
          for (int c = 0; c < M; ++c) out[lay.at(a, b, c)] = box[src++];
  }
}

void gather_box(const Grid& g, const RealDft& dft, const double* padded, double* box) {
  PaddedLayout lay(dft);
  const int M = g.M();
  std::size_t dst = 0;
  switch (g.N()) {
    case 1:
      for (int i = 0; i < M; ++i) box[dst++] = padded[lay.at(i, 0, 0)];
      break;
    case 2:
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) box[dst++] = padded[lay.at(a, b, 0)];
      break;
    default:
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
          for (int c = 0; c < M; ++c) box[dst++] = padded[lay.at(a, b, c)];
  }
}

/// Multiply interleaved complex arrays: inout *= other.
void complex_multiply(double* inout, const double* other, std::size_t n_complex) {
  for (std::size_t k = 0; k < n_complex; ++k) {
    const double ar = inout[2 * k], ai = inout[2 * k + 1];
    const double br = other[2 * k], bi = other[2 * k + 1];
    inout[2 * k] = ar * br - ai * bi;
    inout[2 * k + 1] = ar * bi + ai * br;
  }
}

}  // namespace

NonlocalOperator::NonlocalOperator(const Grid& grid, double s)
    : grid_(grid),
      s_(s),
      two_star_(2.0 * grid.N() / (grid.N() - 2.0 * s)),
      kexp_(-(grid.N() + 2.0 * s) / 2.0),
      pad_(padded_dims(grid)),
      ksp_(pad_.alloc_doubles()),
      rowsum_{grid.spec(), {}} {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0,1)");
  if (!(grid.N() > 2.0 * s)) throw ConfigError("need N > 2s for a finite critical exponent");

  // Kernel on the padded torus: K(d) = |d*h|^{-(N+2s)} at signed offsets,
  // zero at the origin. For in-box index differences the circulant convolution
  // then reproduces the open pair sum exactly.
  const int P = 2 * grid_.M();
  const double h = grid_.h();
  PaddedLayout lay(pad_);
  auto signed_off = [&](int d) { return d <= grid_.M() ? d : d - P; };
  switch (grid_.N()) {
    case 1:
      for (int d = 0; d < P; ++d) {
        const double sd = signed_off(d) * h;
        ksp_.data()[lay.at(d, 0, 0)] = d == 0 ? 0.0 : std::pow(sd * sd, kexp_);
      }
      break;
    case 2:
      for (int d0 = 0; d0 < P; ++d0) {
        const double s0 = signed_off(d0) * h;
        for (int d1 = 0; d1 < P; ++d1) {
          const double s1 = signed_off(d1) * h;
          ksp_.data()[lay.at(d0, d1, 0)] =
              (d0 == 0 && d1 == 0) ? 0.0 : std::pow(s0 * s0 + s1 * s1, kexp_);
        }
      }
      break;
    default:
      for (int d0 = 0; d0 < P; ++d0) {
        const double s0 = signed_off(d0) * h;
        for (int d1 = 0; d1 < P; ++d1) {
          const double s1 = signed_off(d1) * h;
          for (int d2 = 0; d2 < P; ++d2) {
            const double s2 = signed_off(d2) * h;
            ksp_.data()[lay.at(d0, d1, d2)] =
                (d0 == 0 && d1 == 0 && d2 == 0)
                    ? 0.0
                    : std::pow(s0 * s0 + s1 * s1 + s2 * s2, kexp_);
          }
        }
      }
  }
  pad_.forward(ksp_.data());

  // Row sums R = K * 1_box.
  std::vector<double> ones(grid_.size(), 1.0);
  rowsum_.values.resize(grid_.size());
  conv_into(ones.data(), rowsum_.values.data());
}

void NonlocalOperator::conv_into(const double* box_in, double* box_out) const {
  AlignedArray ws(pad_.alloc_doubles());
  scatter_box(grid_, box_in, pad_, ws.data());
  pad_.forward(ws.data());
  complex_multiply(ws.data(), ksp_.data(), pad_.n_complex());
  pad_.inverse(ws.data());
  gather_box(grid_, pad_, ws.data(), box_out);
}

Field NonlocalOperator::kernel_conv(const Field& u) const {
  require_same_grid(u, rowsum_, "kernel_conv");
  Field out{grid_.spec(), std::vector<double>(grid_.size())};
  conv_into(u.values.data(), out.values.data());
  return out;
}

double NonlocalOperator::seminorm_sq(const Field& u) const {
  require_same_grid(u, rowsum_, "seminorm_sq");
  Field cu = kernel_conv(u);
  double t_diag = 0.0, t_cross = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    t_diag += u.values[i] * u.values[i] * rowsum_.values[i];
    t_cross += u.values[i] * cu.values[i];
  }
  const double w = grid_.w();
  return 2.0 * w * w * (t_diag - t_cross);
}

double NonlocalOperator::seminorm_sq(const Field& u, SeminormMethod method, int threads) const {
  return method == SeminormMethod::direct_pairsum ? seminorm_sq_direct(u, threads)
                                                  : seminorm_sq_spectral(u);
}

double NonlocalOperator::pair_sum_block(const Field& u, std::size_t begin, std::size_t end) const {
  const int N = grid_.N(), Mn = grid_.M();
  const auto& ax = grid_.axis();
  const std::size_t n = grid_.size();
  double acc = 0.0;
  std::array<int, 3> id = grid_.unflatten(begin);
  for (std::size_t fi = begin; fi < end; ++fi) {
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    for (int a = 0; a < N; ++a) xi[a] = ax[id[a]];
    const double ui = u.values[fi];
    std::array<int, 3> jd = id;
    for (std::size_t fj = fi + 1; fj < n; ++fj) {
      for (int a = N - 1; a >= 0; --a) {
        if (++jd[a] < Mn) break;
        jd[a] = 0;
      }
      double r2 = 0.0;
      for (int a = 0; a < N; ++a) {
        const double d = ax[jd[a]] - xi[a];
        r2 += d * d;
      }
      const double du = ui - u.values[fj];
      acc += du * du * std::pow(r2, kexp_);
    }
    for (int a = N - 1; a >= 0; --a) {
      if (++id[a] < Mn) break;
      id[a] = 0;
    }
  }
  return acc;
}

double NonlocalOperator::seminorm_sq_direct(const Field& u, int threads) const {
  require_same_grid(u, rowsum_, "seminorm_sq_direct");
  const std::size_t n = grid_.size();
  const double w = grid_.w();
  if (threads <= 1) return 2.0 * w * w * pair_sum_block(u, 0, n);

  const std::size_t T = static_cast<std::size_t>(threads);
  std::vector<double> partial(T, 0.0);
  std::vector<std::thread> pool;
  pool.reserve(T);
  const std::size_t chunk = (n + T - 1) / T;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t b = std::min(n, t * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([this, &u, &partial, t, b, e] { partial[t] = pair_sum_block(u, b, e); });
  }
  for (auto& th : pool) th.join();
  double acc = 0.0;
  for (std::size_t t = 0; t < T; ++t) acc += partial[t];  // fixed combine order
  return 2.0 * w * w * acc;
}

void NonlocalOperator::ensure_boxsp() const {
  std::call_once(boxsp_once_, [this] {
    auto sp = std::make_unique<AlignedArray>(pad_.alloc_doubles());
    std::vector<double> ones(grid_.size(), 1.0);
    scatter_box(grid_, ones.data(), pad_, sp->data());
    pad_.forward(sp->data());
    boxsp_ = std::move(sp);
  });
}

double NonlocalOperator::seminorm_sq_spectral(const Field& u) const {
  require_same_grid(u, rowsum_, "seminorm_sq_spectral");
  ensure_boxsp();

  AlignedArray uhat(pad_.alloc_doubles());
  scatter_box(grid_, u.values.data(), pad_, uhat.data());
  pad_.forward(uhat.data());

  std::vector<double> usq(grid_.size());
  for (std::size_t i = 0; i < usq.size(); ++i) usq[i] = u.values[i] * u.values[i];
  AlignedArray u2hat(pad_.alloc_doubles());
  scatter_box(grid_, usq.data(), pad_, u2hat.data());
  pad_.forward(u2hat.data());

  // Parseval over the padded torus with the r2c half-spectrum: modes off the
  // self-conjugate planes of the last axis count twice.
  const int P = 2 * grid_.M();
  const std::size_t half = static_cast<std::size_t>(P) / 2 + 1;
  const std::size_t nc = pad_.n_complex();
  const double* m = ksp_.data();
  const double* b = boxsp_->data();
  const double* a = uhat.data();
  const double* a2 = u2hat.data();
  double t_diag = 0.0, t_cross = 0.0;
  for (std::size_t k = 0; k < nc; ++k) {
    const std::size_t klast = k % half;
    const double wk = (klast == 0 || klast == half - 1) ? 1.0 : 2.0;
    const double mr = m[2 * k], mi = m[2 * k + 1];
    const double br = b[2 * k], bi = b[2 * k + 1];
    const double ar = a[2 * k], ai = a[2 * k + 1];
    const double cr = a2[2 * k], ci = a2[2 * k + 1];
    // (m b) and Re(u2hat * conj(m b)) for the diagonal term u^2 . (K*1);
    const double zr = mr * br - mi * bi;
    const double zi = mr * bi + mi * br;
    t_diag += wk * (cr * zr + ci * zi);
    // Re(m) |uhat|^2 for the cross term u . (K*u).
    t_cross += wk * mr * (ar * ar + ai * ai);
  }
  const double w = grid_.w();
  double logical = 1.0;
  for (int d = 0; d < grid_.N(); ++d) logical *= P;
  return 2.0 * w * w * (t_diag - t_cross) / logical;
}

Field NonlocalOperator::ds_squared(const Field& u) const {
  require_same_grid(u, rowsum_, "ds_squared");
  Field cu = kernel_conv(u);
  std::vector<double> usq(grid_.size());
  for (std::size_t i = 0; i < usq.size(); ++i) usq[i] = u.values[i] * u.values[i];
  Field cu2{grid_.spec(), std::vector<double>(grid_.size())};
  conv_into(usq.data(), cu2.values.data());
  const double w = grid_.w();
  Field out{grid_.spec(), std::vector<double>(grid_.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = w * (usq[i] * rowsum_.values[i] - 2.0 * u.values[i] * cu.values[i] +
                         cu2.values[i]);
  }
  return out;
}

double NonlocalOperator::bilinear(const Field& u, const Field& v) const {
  require_same_grid(u, v, "bilinear");
  require_same_grid(u, rowsum_, "bilinear");
  Field cv = kernel_conv(v);
  double t_diag = 0.0, t_cross = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    t_diag += u.values[i] * v.values[i] * rowsum_.values[i];
    t_cross += u.values[i] * cv.values[i];
  }
  const double w = grid_.w();
  return 2.0 * w * w * (t_diag - t_cross);
}

Field NonlocalOperator::frac_laplacian(const Field& u) const {
  require_same_grid(u, rowsum_, "frac_laplacian");
  Field cu = kernel_conv(u);
  const double w = grid_.w();
  Field out{grid_.spec(), std::vector<double>(grid_.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = 2.0 * w * (u.values[i] * rowsum_.values[i] - cu.values[i]);
  return out;
}

void NonlocalOperator::ensure_torus() const {
  std::call_once(torus_once_, [this] {
    auto dft = std::make_unique<RealDft>(box_dims(grid_));
    AlignedArray buf(dft->alloc_doubles());
    PaddedLayout lay(*dft);
    const int M = grid_.M();
    const double h = grid_.h();
    const int N = grid_.N();
    // Nearest-image wrapped kernel on the M-torus: for each offset, sum the
    // kernel over the 2^N closest periodic images, skipping the origin.
    auto wrapped = [&](const std::array<int, 3>& d) {
      double acc = 0.0;
      for (int c = 0; c < (1 << N); ++c) {
        double r2 = 0.0;
        bool origin = true;
        for (int a = 0; a < N; ++a) {
          const int off = d[a] - ((c >> a) & 1) * M;
          if (off != 0) origin = false;
          r2 += static_cast<double>(off) * off * h * h;
        }
        if (!origin) acc += std::pow(r2, kexp_);
      }
      return acc;
    };
    std::array<int, 3> d{0, 0, 0};
    switch (N) {
      case 1:
        for (d[0] = 0; d[0] < M; ++d[0]) buf.data()[lay.at(d[0], 0, 0)] = wrapped(d);
        break;
      case 2:
        for (d[0] = 0; d[0] < M; ++d[0])
          for (d[1] = 0; d[1] < M; ++d[1]) buf.data()[lay.at(d[0], d[1], 0)] = wrapped(d);
        break;
      default:
        for (d[0] = 0; d[0] < M; ++d[0])
          for (d[1] = 0; d[1] < M; ++d[1])
            for (d[2] = 0; d[2] < M; ++d[2])
              buf.data()[lay.at(d[0], d[1], d[2])] = wrapped(d);
    }
    dft->forward(buf.data());
    const std::size_t nc = dft->n_complex();
    auto sym = std::make_unique<std::vector<double>>(nc);
    const double r_tor = buf.data()[0];  // k = 0 coefficient: full row sum
    const double w = grid_.w();
    for (std::size_t k = 0; k < nc; ++k) {
      const double v = 2.0 * w * (r_tor - buf.data()[2 * k]);
      (*sym)[k] = v > 0.0 ? v : 0.0;
    }
    tor_ = std::move(dft);
    tor_symbol_ = std::move(sym);
  });
}

Field NonlocalOperator::frac_laplacian_spectral(const Field& u) const {
  require_same_grid(u, rowsum_, "frac_laplacian_spectral");
  ensure_torus();
  AlignedArray ws(tor_->alloc_doubles());
  scatter_box(grid_, u.values.data(), *tor_, ws.data());
  tor_->forward(ws.data());
  for (std::size_t k = 0; k < tor_->n_complex(); ++k) {
    ws.data()[2 * k] *= (*tor_symbol_)[k];
    ws.data()[2 * k + 1] *= (*tor_symbol_)[k];
  }
  tor_->inverse(ws.data());
  Field out{grid_.spec(), std::vector<double>(grid_.size())};
  gather_box(grid_, *tor_, ws.data(), out.values.data());
  return out;
}

double NonlocalOperator::spectral_symbol(const std::array<int, 3>& mode) const {
  ensure_torus();
  const int M = grid_.M();
  const int N = grid_.N();
  std::array<int, 3> k{0, 0, 0};
  for (int a = 0; a < N; ++a) k[a] = ((mode[a] % M) + M) % M;
  if (k[N - 1] > M / 2) {
    for (int a = 0; a < N; ++a) k[a] = (M - k[a]) % M;  // conjugate mode
  }
  const std::size_t half = static_cast<std::size_t>(M) / 2 + 1;
  std::size_t idx = 0;
  switch (N) {
    case 1: idx = static_cast<std::size_t>(k[0]); break;
    case 2: idx = static_cast<std::size_t>(k[0]) * half + static_cast<std::size_t>(k[1]); break;
    default:
      idx = (static_cast<std::size_t>(k[0]) * static_cast<std::size_t>(M) +
             static_cast<std::size_t>(k[1])) * half + static_cast<std::size_t>(k[2]);
  }
  return (*tor_symbol_)[idx];
}

double NonlocalOperator::symbol_constant(int N, double s) {
  const double pi = 3.14159265358979323846;
  return 2.0 * std::pow(pi, N / 2.0) * std::tgamma(1.0 - s) /
         (s * std::pow(4.0, s) * std::tgamma(N / 2.0 + s));
}

}  // namespace fracpass
