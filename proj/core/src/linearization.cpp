// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/linearization.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

namespace vtx {

FieldPair lattice_fields(const VortexConfig& cfg) {
  FieldPair c(cfg.grid);
  c.phi = cfg.phi;
  c.a = nodes_to_links(cfg.alpha);
  return c;
}

StaticBase make_static_base(const FieldPair& c, int ring, double lambda) {
  StaticBase b;
  b.c = c;
  b.mask = make_mask(c.grid(), ring);
  b.lambda = lambda;
  const Grid& g = c.grid();
  double h = g.spacing();
  for (int j = 0; j < g.dim; ++j) {
    b.U[j].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) b.U[j][i] = std::polar(1.0, -h * c.a.c[j].v[i]);
  }
  return b;
}

namespace {

inline double plaq(const GaugePotential& a, std::size_t idx, int k, int j, std::ptrdiff_t sk, std::ptrdiff_t sj,
                   double h) {
  return (a.c[j].v[idx + sk] - a.c[j].v[idx] - a.c[k].v[idx + sj] + a.c[k].v[idx]) / h;
}

TangentVector masked(const StaticBase& b, const TangentVector& t) {
  TangentVector m = t;
  apply_mask(m, b.mask);
  return m;
}

}  // namespace

TangentVector apply_calL(const StaticBase& b, const TangentVector& tin) {
  const Grid& g = b.grid();
  require_same_grid(g, tin.grid(), "apply_calL");
  TangentVector t = masked(b, tin);
  const double h = g.spacing(), ih2 = 1.0 / (h * h), lam = b.lambda;
  const int d = g.dim;
  const auto& phi = b.c.phi.v;
  const auto& pt = t.phi.v;
  TangentVector r(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (b.mask.node[idx]) {
      cplx p = phi[idx], q = pt[idx];
      cplx s = (0.5 * lam * (std::norm(p) - 1.0)) * q + (lam * std::real(std::conj(p) * q)) * p;
      for (int j = 0; j < d; ++j) {
        auto sj = g.stride(j);
        const auto& U = b.U[j];
        double af = t.a.c[j].v[idx], ab = t.a.c[j].v[idx - sj];
        cplx fwd = U[idx] * (pt[idx + sj] - cplx(0, h * af) * phi[idx + sj]);
        cplx bwd = std::conj(U[idx - sj]) * (pt[idx - sj] + cplx(0, h * ab) * phi[idx - sj]);
        s += (2.0 * q - fwd - bwd) * ih2;
      }
      r.phi.v[idx] = s;
    }
    for (int j = 0; j < d; ++j) {
      if (!b.mask.link[j][idx]) continue;
      auto sj = g.stride(j);
      cplx Up = b.U[j][idx] * phi[idx + sj];
      double s = -(std::imag(std::conj(pt[idx]) * Up + std::conj(phi[idx]) * b.U[j][idx] * pt[idx + sj]) -
                   h * t.a.c[j].v[idx] * std::real(std::conj(phi[idx]) * Up)) /
                 h;
      for (int k = 0; k < d; ++k) {
        if (k == j) continue;
        auto sk = g.stride(k);
        s -= (plaq(t.a, idx, k, j, sk, sj, h) - plaq(t.a, idx - sk, k, j, sk, sj, h)) / h;
      }
      r.a.c[j].v[idx] = s;
    }
  }
  return r;
}

ScalarField gauge_function(const StaticBase& b, const TangentVector& t) {
  return gauss_field(b.c, masked(b, t), b.mask);
}

double gauge_residual(const StaticBase& b, const TangentVector& t) {
  ScalarField G = gauge_function(b, t);
  double s = 0.0;
  for (double x : G.v) s += x * x;
  return std::sqrt(s * b.grid().cell_volume());
}

TangentVector apply_L(const StaticBase& b, const TangentVector& t) {
  TangentVector r = apply_calL(b, t);
  ScalarField G = gauge_function(b, t);
  TangentVector gd = gauge_direction(b.c, G);
  apply_mask(gd, b.mask);
  r -= gd;
  return r;
}

DImage apply_D(const StaticBase& b, const TangentVector& tin) {
  const Grid& g = b.grid();
  if (g.dim != 2) throw GridError("apply_D needs a 2D base");
  TangentVector t = masked(b, tin);
  const double h = g.spacing();
  const auto& phi = b.c.phi.v;
  const auto& pt = t.phi.v;
  ScalarField G = gauss_field(b.c, t, b.mask);
  DImage out{ComplexField(g), ComplexField(g)};
  const auto s0 = g.stride(0), s1 = g.stride(1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!b.mask.node[idx]) continue;
    cplx row1 = 0.0;
    for (int j = 0; j < 2; ++j) {
      auto sj = g.stride(j);
      const auto& U = b.U[j];
      double af = t.a.c[j].v[idx], ab = t.a.c[j].v[idx - sj];
      cplx fwd = U[idx] * (pt[idx + sj] - cplx(0, h * af) * phi[idx + sj]);
      cplx bwd = std::conj(U[idx - sj]) * (pt[idx - sj] + cplx(0, h * ab) * phi[idx - sj]);
      cplx dj = (fwd - bwd) / (2.0 * h);
      row1 += (j == 0 ? cplx(1, 0) : cplx(0, 1)) * dj;
    }
    double curl = 0.25 * (plaq(t.a, idx, 0, 1, s0, s1, h) + plaq(t.a, idx - s0, 0, 1, s0, s1, h) +
                          plaq(t.a, idx - s1, 0, 1, s0, s1, h) + plaq(t.a, idx - s0 - s1, 0, 1, s0, s1, h));
    cplx row2(G.v[idx], curl + std::real(phi[idx] * std::conj(pt[idx])));
    out.first.v[idx] = 0.5 * row1;
    out.second.v[idx] = 0.25 * row2;
  }
  return out;
}

double D_form(const DImage& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.first.size(); ++i) s += 4.0 * std::norm(d.first.v[i]) + 16.0 * std::norm(d.second.v[i]);
  return s * d.first.grid.cell_volume();
}

double D_norm(const DImage& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.first.size(); ++i) s += std::norm(d.first.v[i]) + std::norm(d.second.v[i]);
  return std::sqrt(s * d.first.grid.cell_volume());
}

GaugeFixResult gauge_fix(const StaticBase& b, const TangentVector& raw, double tolerance) {
  const Grid& g = b.grid();
  require_same_grid(g, raw.grid(), "gauge_fix");
  if (b.mask.ring != 1) throw SolverError("gauge_fix expects a base with a single frozen ring");
  for (auto z : raw.phi.v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw SolverError("gauge_fix: non-finite tangent");
  GaugeFixResult res;
  res.residual_before = gauge_residual(b, raw);
  ScreenedProblem p;
  p.W = ScalarField(g);
  for (std::size_t i = 0; i < g.size(); ++i) p.W.v[i] = std::norm(b.c.phi.v[i]);
  // G of the raw tangent including its boundary content, evaluated on interior nodes.
  p.f = gauss_field(b.c, raw, b.mask);
  ScalarField bd(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.on_boundary(i)) continue;
    cplx p0 = b.c.phi.v[i];
    if (std::abs(p0) > 1e-12) bd.v[i] = -std::imag(raw.phi.v[i] / p0);
  }
  p.boundary = bd;
  p.tolerance = tolerance;
  auto [chi, rep] = solve_screened(p);
  if (!rep.converged) throw SolverError("gauge_fix: screened solve did not converge");
  res.t = raw;
  res.t += gauge_direction(b.c, chi);
  apply_mask(res.t, b.mask);
  res.chi = std::move(chi);
  res.report = rep;
  res.residual_after = gauge_residual(b, res.t);
  return res;
}

// ---------------------------------------------------------------------------
// DST preconditioner

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct DstPreconditioner::Impl {
  struct Box {
    int comp;  // 0: phi (re and im), 1+j: link component j
    int lo[2], hi[2];
    int nx, ny;
    fftw_plan plan = nullptr;
    std::vector<double> eig;  // nx*ny eigenvalues of -Delta + shift
  };
  Grid g;
  std::vector<Box> boxes;
  mutable std::vector<double> buf;
  double* fbuf = nullptr;
};

DstPreconditioner::DstPreconditioner(const LatticeMask& m, double shift) : impl_(std::make_unique<Impl>()) {
  const Grid& g = m.grid;
  if (g.dim != 2) throw GridError("DST preconditioner is implemented for 2D grids");
  impl_->g = g;
  const double h = g.spacing();
  const int r = m.ring;
  std::size_t maxn = 0;
  for (int comp = 0; comp < 3; ++comp) {
    Impl::Box bx;
    bx.comp = comp;
    for (int a = 0; a < 2; ++a) {
      bx.lo[a] = r;
      bx.hi[a] = g.n[a] - 1 - r;
    }
    if (comp > 0) bx.lo[comp - 1] = r - 1;
    bx.nx = bx.hi[0] - bx.lo[0] + 1;
    bx.ny = bx.hi[1] - bx.lo[1] + 1;
    bx.eig.resize(std::size_t(bx.nx) * bx.ny);
    for (int j = 0; j < bx.ny; ++j)
      for (int i = 0; i < bx.nx; ++i) {
        double ex = (2.0 - 2.0 * std::cos(std::numbers::pi * (i + 1) / (bx.nx + 1))) / (h * h);
        double ey = (2.0 - 2.0 * std::cos(std::numbers::pi * (j + 1) / (bx.ny + 1))) / (h * h);
        bx.eig[std::size_t(j) * bx.nx + i] = ex + ey + shift;
      }
    maxn = std::max(maxn, bx.eig.size());
    impl_->boxes.push_back(std::move(bx));
  }
  // The FFTW planner is not thread-safe.
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  impl_->fbuf = fftw_alloc_real(maxn);
  for (auto& bx : impl_->boxes)
    bx.plan = fftw_plan_r2r_2d(bx.ny, bx.nx, impl_->fbuf, impl_->fbuf, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
}

DstPreconditioner::~DstPreconditioner() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  for (auto& bx : impl_->boxes)
    if (bx.plan) fftw_destroy_plan(bx.plan);
  fftw_free(impl_->fbuf);
}

namespace {
template <class Fn>
void dst_apply(const DstPreconditioner::Impl& im, const Vec& in, Vec& out, Fn&& scale_mode) {
  const Grid& g = im.g;
  const std::size_t n = g.size();
  out.assign(in.size(), 0.0);
  for (const auto& bx : im.boxes) {
    int parts = bx.comp == 0 ? 2 : 1;
    for (int part = 0; part < parts; ++part) {
      auto offset = [&](int i, int j) -> std::size_t {
        std::size_t idx = g.index(i, j);
        return bx.comp == 0 ? 2 * idx + part : (1 + std::size_t(bx.comp)) * n + idx;
      };
      for (int j = 0; j < bx.ny; ++j)
        for (int i = 0; i < bx.nx; ++i) im.fbuf[std::size_t(j) * bx.nx + i] = in[offset(bx.lo[0] + i, bx.lo[1] + j)];
      fftw_execute(bx.plan);
      double norm = 1.0 / (4.0 * (bx.nx + 1) * (bx.ny + 1));
      for (std::size_t k = 0; k < bx.eig.size(); ++k) im.fbuf[k] = scale_mode(im.fbuf[k], bx.eig[k]) * norm;
      fftw_execute(bx.plan);
      for (int j = 0; j < bx.ny; ++j)
        for (int i = 0; i < bx.nx; ++i) out[offset(bx.lo[0] + i, bx.lo[1] + j)] = im.fbuf[std::size_t(j) * bx.nx + i];
    }
  }
}
}  // namespace

void DstPreconditioner::apply(const Vec& r, Vec& z) const {
  dst_apply(*impl_, r, z, [](double v, double e) { return v / e; });
}

void DstPreconditioner::apply_forward(const Vec& x, Vec& y) const {
  dst_apply(*impl_, x, y, [](double v, double e) { return v * e; });
}

// ---------------------------------------------------------------------------

void Deflation::project(Vec& x) const {
  for (const auto& qv : q) {
    double c = vdot(qv, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * qv[i];
  }
}

Deflation make_deflation(const std::vector<TangentVector>& modes) {
  Deflation d;
  for (const auto& m : modes) {
    Vec v = flatten(m);
    d.project(v);
    d.project(v);
    double n = std::sqrt(vdot(v, v));
    if (n == 0.0) continue;
    for (double& x : v) x /= n;
    d.q.push_back(std::move(v));
  }
  return d;
}

namespace {
LinearOp L_operator(const StaticBase& b, const Deflation* defl, double shift) {
  return [&b, defl, shift](const Vec& x, Vec& y) {
    Vec xp = x;
    if (defl) defl->project(xp);
    TangentVector t(b.grid());
    unflatten(xp.data(), t);
    y = flatten(apply_L(b, t));
    if (shift != 0.0)
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift * xp[i];
    if (defl) defl->project(y);
  };
}
}  // namespace

CGResult solve_L(const StaticBase& b, const DstPreconditioner& pre, const Deflation* defl, const Vec& rhs, Vec& x,
                 double tol, int max_it, double shift) {
  LinearOp A = L_operator(b, defl, shift);
  LinearOp M = [&pre, defl](const Vec& r, Vec& z) {
    Vec rp = r;
    if (defl) defl->project(rp);
    pre.apply(rp, z);
    if (defl) defl->project(z);
  };
  Vec bp = rhs;
  if (defl) defl->project(bp);
  if (x.size() != rhs.size()) x.assign(rhs.size(), 0.0);
  if (defl) defl->project(x);
  return pcg(A, M, bp, x, tol, max_it);
}

RelaxReport relax(FieldPair& c, const std::vector<TangentVector>& modes, const RelaxOptions& opt, int ring,
                  double lambda) {
  RelaxReport rep;
  LatticeMask mask = make_mask(c.grid(), ring);
  DstPreconditioner pre(mask, 1.0);
  Deflation defl = make_deflation(modes);
  double prev = 0.0;
  for (int step = 0;; ++step) {
    FieldPair R = static_gradient(c, lambda, mask);
    Vec r = flatten(R);
    Vec rp = r;
    defl.project(rp);
    double mx = 0.0, modal = 0.0;
    for (double v : rp) mx = std::max(mx, std::abs(v));
    for (std::size_t i = 0; i < r.size(); ++i) modal += (r[i] - rp[i]) * (r[i] - rp[i]);
    rep.residual = mx;
    rep.modal_residual = std::sqrt(modal * c.grid().cell_volume());
    rep.steps = step;
    if (mx <= opt.tolerance) {
      rep.converged = true;
      return rep;
    }
    // Leakage of the modal residual through the approximate modes floors the
    // projected residual; accept once Newton stops making progress there.
    if (step > 0 && mx > 0.5 * prev && mx <= 1e-2 * rep.modal_residual) {
      rep.converged = true;
      rep.floored = true;
      return rep;
    }
    prev = mx;
    if (step >= opt.max_steps) return rep;
    StaticBase b = make_static_base(c, ring, lambda);
    for (double& v : rp) v = -v;
    Vec x;
    auto cg = solve_L(b, pre, &defl, rp, x, opt.linear_tolerance, 20000);
    if (!cg.converged && cg.rel_residual > 1e-4) throw SolverError("relax: linear solve failed");
    FieldPair dt(c.grid());
    unflatten(x.data(), dt);
    apply_mask(dt, mask);
    c += dt;
  }
}

ZeroModeBasis zero_modes(const VortexCenters& centers, const Grid& g, const ZeroModeOptions& opt) {
  const int N = int(centers.size());
  if (N == 0) throw SolverError("zero_modes needs at least one vortex");
  const double h = g.spacing();
  const double delta = opt.delta.value_or(0.2 * h);
  bool chart = false;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (std::abs(centers[i] - centers[j]) < 2 * h) chart = true;
  if (opt.coefficient_chart) chart = *opt.coefficient_chart;

  VortexSolveOptions so;
  so.snap_centers = false;
  so.tolerance = opt.solve_tolerance;
  ZeroModeBasis B;
  B.coefficient_chart = chart;
  B.config = solve_vortex(centers, g, so);
  FieldPair base = lattice_fields(B.config);
  so.initial_v = B.config.v;
  auto coeffs = coefficients_from_centers(centers);
  const int M = 2 * N;

  std::vector<std::array<FieldPair, 2>> sides(M);
  for (int mu = 0; mu < M; ++mu) {
    int k = mu / 2;
    cplx dir = (mu % 2 == 0) ? cplx(1, 0) : cplx(0, 1);
    for (int s = 0; s < 2; ++s) {
      double sg = s == 0 ? 1.0 : -1.0;
      VortexCenters cs;
      if (chart) {
        auto cc = coeffs;
        cc[k] += sg * delta * dir;
        cs = centers_from_coefficients(cc);
      } else {
        cs = centers;
        cs[k] += sg * delta * dir;
      }
      sides[mu][s] = lattice_fields(solve_vortex(cs, g, so));
    }
  }

  auto build = [&](const StaticBase& sb, std::vector<TangentVector>& tangents) {
    tangents.clear();
    B.gauge_residuals.clear();
    B.raw_gauge_residuals.clear();
    for (int mu = 0; mu < M; ++mu) {
      FieldPair raw = sides[mu][0];
      raw -= sides[mu][1];
      raw *= 1.0 / (2.0 * delta);
      auto fix = gauge_fix(sb, raw, opt.gauge_tolerance);
      double nrm = norm(fix.t);
      B.raw_gauge_residuals.push_back(fix.residual_before / nrm);
      B.gauge_residuals.push_back(fix.residual_after / nrm);
      tangents.push_back(std::move(fix.t));
    }
  };
  auto orthonormalize = [](const std::vector<TangentVector>& in) {
    std::vector<TangentVector> out;
    for (const auto& t : in) {
      TangentVector v = t;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : out) v.axpy(-dot(q, v), q);
      v *= 1.0 / norm(v);
      out.push_back(std::move(v));
    }
    return out;
  };

  B.base = make_static_base(base);
  build(B.base, B.tangents);
  if (opt.relax) {
    auto approx = orthonormalize(B.tangents);
    B.relax_reports.push_back(relax(base, approx, opt.relax_options));
    for (auto& sd : sides)
      for (auto& c : sd) B.relax_reports.push_back(relax(c, approx, opt.relax_options));
    for (const auto& r : B.relax_reports)
      if (!r.converged) throw SolverError("zero_modes: lattice relaxation did not converge");
    B.base = make_static_base(base);
    build(B.base, B.tangents);
  }

  B.gram.resize(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = i; j < M; ++j) B.gram(i, j) = B.gram(j, i) = dot(B.tangents[i], B.tangents[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(B.gram);
  if (llt.info() != Eigen::Success) throw SolverError("zero_modes: gram matrix is not positive definite");
  B.modes = orthonormalize(B.tangents);
  return B;
}

namespace {

// Orthonormalize columns (plain dot) with a thin QR.
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  return qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), X.cols());
}

Eigen::VectorXd to_eigen(const Vec& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size())); }
Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

}  // namespace

CoercivityReport coercivity(const ZeroModeBasis& basis, const CoercivityOptions& opt) {
  const StaticBase& b = basis.base;
  const int M = int(basis.modes.size());
  const int m = M + opt.extra;
  DstPreconditioner pre(b.mask, 1.0);
  LinearOp Lop = L_operator(b, nullptr, 0.0);
  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> nd;
  const std::size_t n = basis.modes.front().dof();
  auto random_vec = [&]() {
    TangentVector t(b.grid());
    for (auto& z : t.phi.v) z = cplx(nd(rng), nd(rng));
    for (auto& c : t.a.c)
      for (auto& x : c.v) x = nd(rng);
    apply_mask(t, b.mask);
    return flatten(t);
  };

  CoercivityReport rep;
  // Near kernel: block inverse iteration on L + shift with Rayleigh-Ritz.
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < M; ++i) X.col(i) = to_eigen(flatten(basis.modes[i]));
  for (int i = M; i < m; ++i) X.col(i) = to_eigen(random_vec());
  X = orthonormal_columns(X);
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(m, 1e300);
  std::vector<Vec> guesses(m);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::MatrixXd Y(n, m);
    for (int i = 0; i < m; ++i) {
      Vec x = guesses[i];
      auto cg = solve_L(b, pre, nullptr, to_vec(X.col(i)), x, opt.linear_tolerance, 20000, opt.shift);
      if (!cg.converged && cg.rel_residual > 1e-5) throw SolverError("coercivity: inner solve stagnated");
      Y.col(i) = to_eigen(x);
    }
    Y = orthonormal_columns(Y);
    Eigen::MatrixXd LY(n, m);
    for (int i = 0; i < m; ++i) {
      Vec y;
      Lop(to_vec(Y.col(i)), y);
      LY.col(i) = to_eigen(y);
    }
    Eigen::MatrixXd A = Y.transpose() * LY;
    A = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    X = Y * es.eigenvectors();
    Eigen::VectorXd theta = es.eigenvalues();
    // Warm starts: (L + shift)^{-1} x ~ x / (theta + shift).
    for (int i = 0; i < m; ++i) guesses[i] = to_vec(X.col(i) / (theta[i] + opt.shift));
    rep.iterations_kernel = it;
    double change = 0.0;
    for (int i = 0; i < M; ++i)
      change = std::max(change, std::abs(theta[i] - prev[i]) / std::max(std::abs(theta[i]), opt.shift));
    prev = theta;
    if (change <= opt.eig_tolerance) {
      rep.converged = true;
      break;
    }
  }
  rep.spectrum_head.assign(prev.data(), prev.data() + m);
  rep.near_zero.assign(prev.data(), prev.data() + M);

  // Deflated generalized problem L x = gamma B x on the L2 complement of the modes.
  // B is the corrected Hessian at the vacuum (-Delta + 1 with the same lattice
  // boundary structure as L), which serves as the H1 form.
  FieldPair vac_fields(b.grid());
  for (auto& z : vac_fields.phi.v) z = 1.0;
  StaticBase vac = make_static_base(vac_fields, b.mask.ring, b.lambda);
  LinearOp Bop = L_operator(vac, nullptr, 0.0);
  Deflation defl = make_deflation(basis.modes);
  const int gb = opt.gamma_block;
  Eigen::MatrixXd Z(n, gb);
  for (int i = 0; i < gb; ++i) {
    Vec v = random_vec();
    defl.project(v);
    Z.col(i) = to_eigen(v);
  }
  Z = orthonormal_columns(Z);
  double gprev = 1e300;
  bool gconv = false;
  std::vector<Vec> gguess(gb);
  Eigen::VectorXd gam;
  for (int it = 1; it <= opt.max_iterations * 4; ++it) {
    Eigen::MatrixXd W(n, gb);
    for (int i = 0; i < gb; ++i) {
      Vec bx;
      Bop(to_vec(Z.col(i)), bx);
      Vec x = gguess[i];
      auto cg = solve_L(b, pre, &defl, bx, x, opt.linear_tolerance, 20000);
      if (!cg.converged && cg.rel_residual > 1e-5) throw SolverError("coercivity: deflated solve stagnated");
      defl.project(x);
      W.col(i) = to_eigen(x);
    }
    W = orthonormal_columns(W);
    Eigen::MatrixXd LW(n, gb), BW(n, gb);
    for (int i = 0; i < gb; ++i) {
      Vec y, z, w = to_vec(W.col(i));
      Lop(w, y);
      Bop(w, z);
      LW.col(i) = to_eigen(y);
      BW.col(i) = to_eigen(z);
    }
    Eigen::MatrixXd A = W.transpose() * LW, Bm = W.transpose() * BW;
    A = 0.5 * (A + A.transpose());
    Bm = 0.5 * (Bm + Bm.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, Bm);
    Z = W * ges.eigenvectors();
    gam = ges.eigenvalues();
    for (int i = 0; i < gb; ++i) gguess[i] = to_vec(Z.col(i) / gam[i]);
    rep.iterations_gamma = it;
    if (std::abs(gam[0] - gprev) <= opt.eig_tolerance * std::abs(gam[0])) {
      gconv = true;
      break;
    }
    gprev = gam[0];
  }
  rep.gamma_min = gam[0];
  rep.gamma_vector = TangentVector(b.grid());
  unflatten(Z.col(0).data(), rep.gamma_vector);
  rep.gamma_head.assign(gam.data(), gam.data() + gam.size());
  rep.converged = rep.converged && gconv;
  return rep;
}

}  // namespace vtx
