// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/ansatz.hpp"

#include "vtx/evolution.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <set>

namespace vtx {

namespace {

using Offset = std::pair<int, int>;

double max_abs_center(const VortexCenters& q) {
  double r = 0.0;
  for (auto z : q) r = std::max(r, std::abs(z));
  return r;
}

// Quintic smoothstep: 0 below R, 1 above 2R.
double cutoff(double r, double R) {
  double s = std::clamp((r - R) / R, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

ScalarField node_modulus_sq(const FieldPair& c) {
  ScalarField w(c.grid());
  for (std::size_t i = 0; i < w.size(); ++i) w.v[i] = std::norm(c.phi.v[i]);
  return w;
}

// (-Delta + W) u on interior nodes, zero on the outer layer.
ScalarField screened_apply(const ScalarField& u, const ScalarField& W) {
  const Grid& g = u.grid;
  double h = g.spacing();
  ScalarField out(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.on_boundary(idx)) continue;
    double lap = 0.0;
    for (int j = 0; j < g.dim; ++j)
      lap += u.v[idx + g.stride(j)] + u.v[idx - g.stride(j)] - 2.0 * u.v[idx];
    out.v[idx] = -lap / (h * h) + W.v[idx] * u.v[idx];
  }
  return out;
}

std::vector<cplx> center_difference(const VortexCenters& plus, const VortexCenters& minus, double step) {
  std::vector<cplx> d(plus.size());
  for (std::size_t k = 0; k < plus.size(); ++k) d[k] = (plus[k] - minus[k]) / step;
  return d;
}

// Slow-variable engine around (tau0, zeta0) with step delta.
class SlowPoints {
 public:
  SlowPoints(const WaveMapFn& q, double tau0, double zeta0, double delta, double margin, SliceCache& cache)
      : q_(q), tau0_(tau0), zeta0_(zeta0), delta_(delta), margin_(margin), cache_(cache) {}

  VortexCenters centers(Offset p) const {
    return q_(tau0_ + p.first * delta_, zeta0_ + p.second * delta_);
  }
  const FieldPair& eta(Offset p) { return cache_.eta(centers(p)); }

  // Gauge-fixed velocity along axis 0 (tau) or 1 (zeta) with its a~.
  const GaugeFieldResult& velocity(Offset p, int axis) {
    auto& memo = vel_[axis];
    auto it = memo.find(p);
    if (it != memo.end()) return it->second;
    Offset lo = p, hi = p;
    (axis == 0 ? lo.first : lo.second) -= 1;
    (axis == 0 ? hi.first : hi.second) += 1;
    FieldPair raw = eta(hi);
    raw -= eta(lo);
    raw *= 1.0 / (2.0 * delta_);
    auto dq = center_difference(centers(hi), centers(lo), 2.0 * delta_);
    StaticBase b = make_static_base(eta(p));
    return memo.emplace(p, gauge_fields_03(b, raw, centers(p), dq, margin_)).first->second;
  }

  const TangentVector& defect(Offset p) {
    auto it = T_.find(p);
    if (it != T_.end()) return it->second;
    const auto& v0 = velocity(p, 0);
    const auto& v3 = velocity(p, 1);
    TangentVector T = velocity({p.first + 1, p.second}, 0).velocity;
    T -= velocity({p.first - 1, p.second}, 0).velocity;
    T.axpy(-1.0, velocity({p.first, p.second + 1}, 1).velocity);
    T.axpy(1.0, velocity({p.first, p.second - 1}, 1).velocity);
    T *= 1.0 / (2.0 * delta_);
    for (std::size_t i = 0; i < T.phi.size(); ++i)
      T.phi.v[i] -= cplx(0.0, 1.0) * (v0.a.v[i] * v0.velocity.phi.v[i] - v3.a.v[i] * v3.velocity.phi.v[i]);
    StaticBase b = make_static_base(eta(p));
    apply_mask(T, b.mask);
    return T_.emplace(p, std::move(T)).first->second;
  }

  // Every static needed for the defect at the given points.
  std::vector<VortexCenters> needed(const std::vector<Offset>& pts) const {
    std::set<Offset> s;
    for (auto p : pts)
      for (int k = -2; k <= 2; ++k) {
        s.insert({p.first + k, p.second});
        s.insert({p.first, p.second + k});
      }
    std::vector<VortexCenters> out;
    for (auto p : s) out.push_back(centers(p));
    return out;
  }

  double delta() const { return delta_; }

 private:
  WaveMapFn q_;
  double tau0_, zeta0_, delta_, margin_;
  SliceCache& cache_;
  std::map<Offset, GaugeFieldResult> vel_[2];
  std::map<Offset, TangentVector> T_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Slice cache

SliceCache::SliceCache(const Grid& g, ZeroModeOptions opt) : g_(g), opt_(std::move(opt)) {
  opt_.relax = true;
}

SliceCache::Key SliceCache::key(const VortexCenters& q) {
  Key k;
  for (auto z : q) {
    k.push_back(z.real());
    k.push_back(z.imag());
  }
  return k;
}

FieldPair SliceCache::build(const VortexCenters& q) const {
  ZeroModeOptions o = opt_;
  o.relax = false;
  ZeroModeBasis B = zero_modes(q, g_, o);
  FieldPair c = B.base.c;
  auto rep = relax(c, B.modes, opt_.relax_options);
  if (!rep.converged) throw AnsatzError("lattice relaxation of a slice did not converge");
  return c;
}

const FieldPair& SliceCache::eta(const VortexCenters& q) {
  Key k = key(q);
  auto it = eta_.find(k);
  if (it != eta_.end()) return it->second;
  return eta_.emplace(k, build(q)).first->second;
}

const ZeroModeBasis& SliceCache::basis(const VortexCenters& q) {
  Key k = key(q);
  auto it = basis_.find(k);
  if (it != basis_.end()) return *it->second;
  auto B = std::make_unique<ZeroModeBasis>(zero_modes(q, g_, opt_));
  eta_.try_emplace(k, B->base.c);
  return *basis_.emplace(k, std::move(B)).first->second;
}

void SliceCache::prefetch(const std::vector<VortexCenters>& qs, int jobs) {
  std::vector<VortexCenters> todo;
  std::set<Key> seen;
  for (const auto& q : qs) {
    Key k = key(q);
    if (eta_.count(k) || !seen.insert(k).second) continue;
    todo.push_back(q);
  }
  jobs = std::max(1, jobs);
  for (std::size_t start = 0; start < todo.size(); start += std::size_t(jobs)) {
    std::size_t stop = std::min(todo.size(), start + std::size_t(jobs));
    if (jobs == 1) {
      eta_.emplace(key(todo[start]), build(todo[start]));
      continue;
    }
    std::vector<std::future<FieldPair>> fs;
    for (std::size_t i = start; i < stop; ++i)
      fs.push_back(std::async(std::launch::async, [this, &todo, i] { return build(todo[i]); }));
    for (std::size_t i = start; i < stop; ++i) eta_.emplace(key(todo[i]), fs[i - start].get());
  }
}

// ---------------------------------------------------------------------------
// Gauge fields

ScalarField half_theta_derivative(const VortexCenters& q, const std::vector<cplx>& dq, const Grid& g) {
  ScalarField out(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto co = g.coords(idx);
    cplx z(g.coord(0, co[0]), g.coord(1, co[1]));
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      cplx w = z - q[k];
      if (std::abs(w) > 0.0) s += std::imag(-dq[k] / w);
    }
    out.v[idx] = s;
  }
  return out;
}

GaugeFieldResult gauge_fields_03(const StaticBase& base, const TangentVector& raw, const VortexCenters& q,
                                 const std::vector<cplx>& dq, double margin, double tolerance) {
  const Grid& g = base.grid();
  require_same_grid(g, raw.grid(), "gauge_fields_03");
  if (dq.size() != q.size()) throw AnsatzError("gauge_fields_03: center derivative size mismatch");
  GaugeFieldResult res;
  res.R = max_abs_center(q) + margin;
  double half_width = std::min(-g.origin[0], g.coord(0, g.n[0] - 1));
  half_width = std::min({half_width, -g.origin[1], g.coord(1, g.n[1] - 1)});
  if (!(2.0 * res.R < half_width - g.spacing()))
    throw AnsatzError("gauge_fields_03: cutoff radius 2R must lie inside the domain");

  ScalarField W = node_modulus_sq(base.c);
  ScalarField G = gauss_field(base.c, raw, base.mask);
  ScalarField theta = half_theta_derivative(q, dq, g);
  ScalarField w(g, 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    auto co = g.coords(idx);
    double r = std::hypot(g.coord(0, co[0]), g.coord(1, co[1]));
    w.v[idx] = cutoff(r, res.R) * theta.v[idx];
  }
  // b = a~ - w: (-Delta + W) b = -G - (-Delta + W) w inside, phase data minus w on the edge.
  ScreenedProblem p;
  p.W = W;
  p.f = screened_apply(w, W);
  for (std::size_t i = 0; i < g.size(); ++i) p.f.v[i] = -G.v[i] - p.f.v[i];
  ScalarField bd(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.on_boundary(i)) continue;
    cplx p0 = base.c.phi.v[i];
    double edge = std::abs(p0) > 1e-12 ? std::imag(raw.phi.v[i] / p0) : 0.0;
    bd.v[i] = edge - w.v[i];
  }
  p.boundary = bd;
  p.tolerance = tolerance;
  auto [b, rep] = solve_screened(p);
  if (!rep.converged) throw SolverError("gauge_fields_03: screened solve did not converge");
  res.report = rep;
  res.a = w;
  res.a += b;

  ScalarField check = screened_apply(res.a, W);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.on_boundary(i)) res.residual = std::max(res.residual, std::abs(check.v[i] + G.v[i]));

  ScalarField minus = res.a;
  minus *= -1.0;
  res.velocity = raw;
  res.velocity += gauge_direction(base.c, minus);
  apply_mask(res.velocity, base.mask);
  double n = norm(res.velocity);
  res.gauge_residual = n > 0.0 ? gauge_residual(base, res.velocity) / n : 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// Defect vector

std::vector<double> mode_pairings(const TangentVector& T, const ZeroModeBasis& basis) {
  std::vector<double> out;
  for (const auto& e : basis.modes) out.push_back(dot(T, e));
  return out;
}

DefectReport defect_T(const WaveMapFn& q, double tau, double zeta, const DefectOptions& opt, SliceCache* cache) {
  if (!(opt.delta > 0.0)) throw AnsatzError("defect_T: delta must be positive");
  std::unique_ptr<SliceCache> own;
  if (!cache) {
    own = std::make_unique<SliceCache>(Grid::square(opt.L, opt.h));
    cache = own.get();
  }
  SlowPoints sp(q, tau, zeta, opt.delta, opt.margin, *cache);
  // A step that moves a center by more than a cell no longer resolves d^2 q.
  for (auto p : std::vector<Offset>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
    auto a = sp.centers(p), b = sp.centers({0, 0});
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(a[k] - b[k]) > cache->grid().spacing())
        throw AnsatzError("defect_T: stencil too coarse for the lattice spacing");
  }
  DefectReport rep;
  rep.T = sp.defect({0, 0});
  rep.g0 = sp.velocity({0, 0}, 0);
  rep.g3 = sp.velocity({0, 0}, 1);
  rep.norm = norm(rep.T);
  rep.pairings = mode_pairings(rep.T, cache->basis(sp.centers({0, 0})));
  for (double v : rep.pairings) rep.max_pairing = std::max(rep.max_pairing, std::abs(v));
  if (rep.norm > 0.0) rep.max_pairing /= rep.norm;
  return rep;
}

// ---------------------------------------------------------------------------
// First-order correction

Psi1Result solve_psi1(const TangentVector& T, const ZeroModeBasis& basis, double tolerance) {
  const StaticBase& b = basis.base;
  const Grid& g = b.grid();
  require_same_grid(g, T.grid(), "solve_psi1");
  Psi1Result res;
  res.psi = TangentVector(g);
  double Tn = norm(T);
  res.removed_pairings.assign(basis.modes.size(), 0.0);
  if (Tn == 0.0) return res;

  // Gauge component: T + (i phi chi, grad chi) with (-Delta + |phi|^2) chi = G(T), chi = 0 on the edge.
  TangentVector Tp = T;
  apply_mask(Tp, b.mask);
  ScreenedProblem p;
  p.W = node_modulus_sq(b.c);
  p.f = gauss_field(b.c, Tp, b.mask);
  p.tolerance = 1e-12;
  auto [chi, srep] = solve_screened(p);
  if (!srep.converged) throw SolverError("solve_psi1: gauge projection did not converge");
  TangentVector gd = gauge_direction(b.c, chi);
  apply_mask(gd, b.mask);
  res.removed_gauge = norm(gd) / Tn;
  Tp += gd;
  for (std::size_t mu = 0; mu < basis.modes.size(); ++mu) {
    double c = dot(Tp, basis.modes[mu]);
    res.removed_pairings[mu] = c;
    Tp.axpy(-c, basis.modes[mu]);
  }

  DstPreconditioner pre(b.mask, 1.0);
  Deflation defl = make_deflation(basis.modes);
  Vec rhs = flatten(Tp);
  for (double& v : rhs) v = -v;
  Vec x;
  CGResult cg = solve_L(b, pre, &defl, rhs, x, tolerance, 20000);
  if (!cg.converged) throw SolverError("solve_psi1: CG did not converge");
  res.iterations = cg.iterations;
  unflatten(x.data(), res.psi);
  apply_mask(res.psi, b.mask);

  TangentVector r = apply_L(b, res.psi);
  r += Tp;
  apply_mask(r, b.mask);
  double leak = 0.0;
  for (const auto& e : basis.modes) {
    double c = dot(r, e);
    leak += c * c;
    r.axpy(-c, e);
  }
  res.residual = norm(r) / Tn;
  res.modal_leakage = std::sqrt(leak) / Tn;
  double pn = norm(res.psi);
  if (pn > 0.0) {
    for (const auto& e : basis.modes) res.mode_overlap = std::max(res.mode_overlap, std::abs(dot(res.psi, e)) / pn);
    res.gauge_residual = gauge_residual(b, res.psi) / pn;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Space-time residuals

const SpaceTimeSlice& Stencil::at(int a, int b) const {
  auto it = slices.find({a, b});
  if (it == slices.end()) throw AnsatzError("stencil point (" + std::to_string(a) + ", " + std::to_string(b) + ") missing");
  return it->second;
}

std::vector<std::pair<int, int>> stencil_points(bool with_continuity) {
  std::vector<Offset> out;
  int R = with_continuity ? 2 : 1;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b)
      if (!(std::abs(a) == 2 && std::abs(b) == 2)) out.push_back({a, b});
  return out;
}

SComponents evaluate_S(const Stencil& st, int a, int b) {
  const SpaceTimeSlice& c = st.at(a, b);
  const SpaceTimeSlice& tp = st.at(a + 1, b);
  const SpaceTimeSlice& tm = st.at(a - 1, b);
  const SpaceTimeSlice& zp = st.at(a, b + 1);
  const SpaceTimeSlice& zm = st.at(a, b - 1);
  const SpaceTimeSlice& pp = st.at(a + 1, b + 1);
  const SpaceTimeSlice& pm = st.at(a + 1, b - 1);
  const SpaceTimeSlice& mp = st.at(a - 1, b + 1);
  const SpaceTimeSlice& mm = st.at(a - 1, b - 1);
  const Grid& g = c.c.grid();
  const double h = g.spacing(), d = st.d;
  const cplx I(0.0, 1.0);
  LatticeMask mask = make_mask(g, 1);
  FieldPair R = static_gradient(c.c, st.lambda, mask);

  SComponents S;
  S.phi = ComplexField(g);
  S.a1 = ScalarField(g);
  S.a2 = ScalarField(g);
  S.a0 = ScalarField(g);
  S.a3 = ScalarField(g);
  ScalarField* Sa[2] = {&S.a1, &S.a2};

  // Parallel transports over half steps in t and z, as node fields.
  auto transport = [&](const ScalarField& x, const ScalarField& y, std::size_t i) {
    return std::exp(-I * d * 0.5 * (x.v[i] + y.v[i]));
  };

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask.node[i]) continue;
    cplx P = c.c.phi.v[i];
    cplx U0p = transport(c.a0, tp.a0, i), U0m = transport(c.a0, tm.a0, i);
    cplx U3p = transport(c.a3, zp.a3, i), U3m = transport(c.a3, zm.a3, i);
    cplx f0p = U0p * tp.c.phi.v[i], f0m = std::conj(U0m) * tm.c.phi.v[i];
    cplx f3p = U3p * zp.c.phi.v[i], f3m = std::conj(U3m) * zm.c.phi.v[i];
    cplx D0D0 = (f0p - 2.0 * P + f0m) / (d * d);
    cplx D3D3 = (f3p - 2.0 * P + f3m) / (d * d);
    S.phi.v[i] = D0D0 - D3D3 + R.phi.v[i];

    cplx D0 = (f0p - f0m) / (2.0 * d), D3 = (f3p - f3m) / (2.0 * d);
    double divF0 = 0.0, divF3 = 0.0;
    for (int k = 0; k < 2; ++k) {
      auto s = g.stride(k);
      // F_k0 = grad_k A0 - d_t A_k and F_k3 = grad_k A3 - d_z A_k on the two links at i.
      auto Fk0 = [&](std::size_t l) {
        return (c.a0.v[l + s] - c.a0.v[l]) / h - (tp.c.a.c[k].v[l] - tm.c.a.c[k].v[l]) / (2.0 * d);
      };
      auto Fk3 = [&](std::size_t l) {
        return (c.a3.v[l + s] - c.a3.v[l]) / h - (zp.c.a.c[k].v[l] - zm.c.a.c[k].v[l]) / (2.0 * d);
      };
      divF0 += (Fk0(i) - Fk0(i - s)) / h;
      divF3 += (Fk3(i) - Fk3(i - s)) / h;
    }
    double d3F30 = (zp.a0.v[i] - 2.0 * c.a0.v[i] + zm.a0.v[i]) / (d * d) -
                   (pp.a3.v[i] - pm.a3.v[i] - mp.a3.v[i] + mm.a3.v[i]) / (4.0 * d * d);
    double d0F03 = (tp.a3.v[i] - 2.0 * c.a3.v[i] + tm.a3.v[i]) / (d * d) -
                   (pp.a0.v[i] - pm.a0.v[i] - mp.a0.v[i] + mm.a0.v[i]) / (4.0 * d * d);
    S.a0.v[i] = -divF0 - d3F30 - std::imag(std::conj(P) * D0);
    S.a3.v[i] = d0F03 - divF3 - std::imag(std::conj(P) * D3);
  }

  for (int j = 0; j < 2; ++j) {
    auto s = g.stride(j);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!mask.link[j][i]) continue;
      // F_0j and F_3j at the half steps around the centre.
      auto F = [&](const SpaceTimeSlice& hi, const SpaceTimeSlice& lo, bool time) {
        const ScalarField& fh = time ? hi.a0 : hi.a3;
        const ScalarField& fl = time ? lo.a0 : lo.a3;
        double grad = 0.5 * ((fh.v[i + s] - fh.v[i]) + (fl.v[i + s] - fl.v[i])) / h;
        return (hi.c.a.c[j].v[i] - lo.c.a.c[j].v[i]) / d - grad;
      };
      double d0F0j = (F(tp, c, true) - F(c, tm, true)) / d;
      double d3F3j = (F(zp, c, false) - F(c, zm, false)) / d;
      Sa[j]->v[i] = d0F0j - d3F3j + R.a.c[j].v[i];
    }
  }
  return S;
}

SNorms s_norms(const SComponents& s) {
  SNorms n;
  n.phi = norm_l2(s.phi);
  n.a1 = norm_l2(s.a1);
  n.a2 = norm_l2(s.a2);
  n.a0 = norm_l2(s.a0);
  n.a3 = norm_l2(s.a3);
  return n;
}

ContinuityReport continuity_check(const Stencil& st) {
  SComponents S = evaluate_S(st, 0, 0);
  SComponents Stp = evaluate_S(st, 1, 0), Stm = evaluate_S(st, -1, 0);
  SComponents Szp = evaluate_S(st, 0, 1), Szm = evaluate_S(st, 0, -1);
  const SpaceTimeSlice& c = st.at(0, 0);
  const Grid& g = c.c.grid();
  const double h = g.spacing(), d = st.d;
  LatticeMask mask = make_mask(g, 1);
  ScalarField terms[4] = {ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  ScalarField total(g);
  const ScalarField* Sa[2] = {&S.a1, &S.a2};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask.node[i]) continue;
    terms[0].v[i] = std::real(S.phi.v[i] * std::conj(cplx(0.0, 1.0) * c.c.phi.v[i]));
    terms[1].v[i] = (Stp.a0.v[i] - Stm.a0.v[i]) / (2.0 * d);
    double div = 0.0;
    for (int j = 0; j < 2; ++j) div += (Sa[j]->v[i] - Sa[j]->v[i - g.stride(j)]) / h;
    terms[2].v[i] = -div;
    terms[3].v[i] = -(Szp.a3.v[i] - Szm.a3.v[i]) / (2.0 * d);
    total.v[i] = terms[0].v[i] + terms[1].v[i] + terms[2].v[i] + terms[3].v[i];
  }
  ContinuityReport rep;
  rep.residual = norm_l2(total);
  for (const auto& t : terms) rep.scale = std::max(rep.scale, norm_l2(t));
  rep.relative = rep.scale > 0.0 ? rep.residual / rep.scale : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Ansatz assembly

Stencil ansatz_stencil(const WaveMapFn& q, double eps, const AnsatzOptions& opt, bool first_order,
                       SliceCache& cache, ResidualReport* diag) {
  if (!(eps > 0.0) || !(opt.d > 0.0)) throw AnsatzError("ansatz: epsilon and d must be positive");
  const double delta = eps * opt.d;
  // Slices are relaxed to ~1e-9; second differences divide that by delta^2.
  if (delta < 1e-4) throw AnsatzError("ansatz: slow step eps * d below the slice accuracy");
  if (opt.d > 1.0) throw AnsatzError("ansatz: stencil spacing d must not exceed 1");
  SlowPoints sp(q, opt.tau0, opt.zeta0, delta, opt.margin, cache);
  auto pts = stencil_points(opt.continuity);
  for (auto p : pts) {
    auto a = sp.centers(p), b = sp.centers({0, 0});
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(a[k] - b[k]) > 4.0 * cache.grid().spacing())
        throw AnsatzError("ansatz: centers move more than four cells across the stencil");
  }
  if (first_order) {
    cache.prefetch(sp.needed(pts), opt.jobs);
  } else {
    std::vector<VortexCenters> qs;
    for (auto p : pts) qs.push_back(sp.centers(p));
    cache.prefetch(qs, opt.jobs);
  }

  Stencil st;
  st.d = opt.d;
  const Grid& g = cache.grid();
  for (auto p : pts) {
    SpaceTimeSlice s;
    s.c = sp.eta(p);
    s.a0 = ScalarField(g, 0.0);
    s.a3 = ScalarField(g, 0.0);
    if (first_order) {
      const auto& v0 = sp.velocity(p, 0);
      const auto& v3 = sp.velocity(p, 1);
      const ZeroModeBasis& B = cache.basis(sp.centers(p));
      const TangentVector& T = sp.defect(p);
      Psi1Result psi = solve_psi1(T, B, opt.psi_tolerance);
      s.c.axpy(eps * eps, psi.psi);
      for (std::size_t i = 0; i < g.size(); ++i) {
        s.a0.v[i] = eps * v0.a.v[i];
        s.a3.v[i] = eps * v3.a.v[i];
      }
      if (diag) {
        double Tn = norm(T);
        for (double c : mode_pairings(T, B))
          if (Tn > 0.0) diag->max_T_pairing = std::max(diag->max_T_pairing, std::abs(c) / Tn);
        diag->max_psi_residual = std::max(diag->max_psi_residual, psi.residual);
        diag->max_psi_leakage = std::max(diag->max_psi_leakage, psi.modal_leakage);
        diag->max_psi_removed_gauge = std::max(diag->max_psi_removed_gauge, psi.removed_gauge);
        diag->max_psi_mode_overlap = std::max(diag->max_psi_mode_overlap, psi.mode_overlap);
        diag->max_psi_gauge = std::max(diag->max_psi_gauge, psi.gauge_residual);
        diag->max_gauge_field_residual =
            std::max({diag->max_gauge_field_residual, v0.residual, v3.residual});
        if (p == Offset{0, 0}) {
          double r0 = v0.R, r1 = -g.origin[0] - 1.0;
          if (r1 - r0 > 4.0 * g.spacing()) {
            if (norm(psi.psi) > 0.0) diag->psi_tail_rate = tail_exponential_rate(tangent_magnitude(psi.psi), 0.0, r0, r1);
            ScalarField mag = v0.a;
            for (auto& x : mag.v) x = std::abs(x);
            if (norm_linf(mag) > 0.0) diag->a0_tail_power = tail_power(mag, 0.0, r0, r1);
          }
        }
      }
    }
    st.slices.emplace(p, std::move(s));
  }
  return st;
}

ResidualReport ansatz_residual(const WaveMapFn& q, double eps, const AnsatzOptions& opt, SliceCache* cache) {
  auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<SliceCache> own;
  if (!cache) {
    own = std::make_unique<SliceCache>(Grid::square(opt.L, opt.h));
    cache = own.get();
  }
  ResidualReport rep;
  rep.epsilon = eps;
  Stencil first = ansatz_stencil(q, eps, opt, true, *cache, &rep);
  rep.S = s_norms(evaluate_S(first));
  if (opt.continuity) rep.continuity = continuity_check(first);
  Stencil zeroth = ansatz_stencil(q, eps, opt, false, *cache);
  rep.S_zeroth = s_norms(evaluate_S(zeroth));
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

std::vector<ResidualReport> residual_scan(const WaveMapFn& q, const std::vector<double>& eps,
                                          const AnsatzOptions& opt) {
  SliceCache cache(Grid::square(opt.L, opt.h));
  std::vector<ResidualReport> out;
  for (double e : eps) out.push_back(ansatz_residual(q, e, opt, &cache));
  return out;
}

// ---------------------------------------------------------------------------
// Built-in maps

WaveMapFn geodesic_wave_map(const ReducedMetric& m, const GeodesicState& s0, double dtau) {
  return [m, s0, dtau](double tau, double) -> VortexCenters {
    if (tau < s0.tau) throw AnsatzError("geodesic map evaluated before its initial time");
    double r = s0.r, th = s0.theta;
    if (tau > s0.tau) {
      IntegrateOptions io;
      io.dtau = dtau;
      io.sample_every = 1 << 30;
      auto tr = geodesic_integrate(m, s0, tau - s0.tau, io);
      r = tr.back().r;
      th = tr.back().theta;
    }
    cplx Z = std::polar(r, th);
    return {Z, -Z};
  };
}

WaveMapFn straight_line_map(const ReducedMetric& m, const GeodesicState& s0) {
  auto v = center_velocities(m, s0);
  cplx Z0 = std::polar(s0.r, s0.theta);
  cplx V(v[0], v[1]);
  return [Z0, V, s0](double tau, double) -> VortexCenters {
    cplx Z = Z0 + (tau - s0.tau) * V;
    return {Z, -Z};
  };
}

// ---------------------------------------------------------------------------
// Tail fits

ScalarField tangent_magnitude(const TangentVector& t) {
  const Grid& g = t.grid();
  ScalarField m(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = std::norm(t.phi.v[i]);
    for (int j = 0; j < g.dim; ++j) s += t.a.c[j].v[i] * t.a.c[j].v[i];
    m.v[i] = std::sqrt(s);
  }
  return m;
}

namespace {
// Least-squares slope of log(max |f| per radial bin) against x(r).
double binned_log_slope(const ScalarField& f, cplx center, double r0, double r1, double (*x_of)(double)) {
  const Grid& g = f.grid;
  double bw = 2.0 * g.spacing();
  int nb = std::max(2, int(std::floor((r1 - r0) / bw)));
  std::vector<double> mx(std::size_t(nb), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto co = g.coords(i);
    double r = std::abs(cplx(g.coord(0, co[0]), g.coord(1, co[1])) - center);
    if (r < r0 || r >= r0 + nb * bw) continue;
    int k = std::min(nb - 1, int((r - r0) / bw));
    mx[std::size_t(k)] = std::max(mx[std::size_t(k)], std::abs(f.v[i]));
  }
  Eigen::MatrixXd A(nb, 2);
  Eigen::VectorXd y(nb);
  int used = 0;
  for (int k = 0; k < nb; ++k) {
    if (!(mx[std::size_t(k)] > 0.0)) continue;
    double r = r0 + (k + 0.5) * bw;
    A(used, 0) = 1.0;
    A(used, 1) = x_of(r);
    y(used) = std::log(mx[std::size_t(k)]);
    ++used;
  }
  if (used < 2) throw AnsatzError("tail fit: fewer than two populated bins");
  Eigen::Vector2d c = A.topRows(used).colPivHouseholderQr().solve(y.head(used));
  return c(1);
}
double identity(double r) { return r; }
double log1p_r(double r) { return std::log(r + 1.0); }
}  // namespace

double tail_exponential_rate(const ScalarField& magnitude, cplx center, double r0, double r1) {
  return -binned_log_slope(magnitude, center, r0, r1, identity);
}

double tail_power(const ScalarField& magnitude, cplx center, double r0, double r1) {
  return -binned_log_slope(magnitude, center, r0, r1, log1p_r);
}

}  // namespace vtx
