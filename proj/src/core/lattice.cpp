#include "hamalg/core/lattice.hpp"

#include "hamalg/core/json.hpp"
#include "hamalg/core/parser.hpp"
#include "hamalg/core/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hamalg {

void LatticeConfig::validate() const {
  if (N < 8 || N % 2) throw Error(ErrorCode::Usage, "lattice N must be even and at least 8");
  if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorCode::Usage, "lattice L must be positive");
  if (stencil != 2 && stencil != 4) throw Error(ErrorCode::Usage, "stencil order must be 2 or 4");
}

double GaussianProfile::derivative(int k, double x) const {
  std::vector<double> p = poly;
  for (int step = 0; step < k; ++step) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t n = 1; n < p.size(); ++n) q[n - 1] += n * p[n];
    for (std::size_t n = 0; n < p.size(); ++n) q[n + 1] -= 2.0 * a * p[n];
    p = std::move(q);
  }
  const double t = x - c;
  double v = 0;
  for (std::size_t n = p.size(); n-- > 0;) v = v * t + p[n];
  return v * std::exp(-a * t * t);
}

Binding Binding::defaults(const Session& s) {
  Binding b;
  for (std::size_t k = 0; k < s.functions().size(); ++k) {
    const auto& name = s.functions()[k];
    GaussianProfile g;
    if (name == "f") {
      g = {{1.0}, 0.5, 0.2};
    } else if (name == "g") {
      g = {{1.0, 0.5}, 0.35, -0.3};
    } else if (name == "j") {
      g = {{0.0, 1.0}, 0.6, 0.1};
    } else {
      g = {{1.0}, 0.4 + 0.05 * static_cast<double>(k % 5), 0.1 * static_cast<double>(k % 7) - 0.3};
    }
    b.functions[name] = g;
  }
  return b;
}

LatticeState StateProfile::sample(const LatticeConfig& cfg) const {
  LatticeState st;
  st.phi.assign(cfg.N, 0.0);
  st.pi.assign(cfg.N, 0.0);
  for (int i = 0; i < cfg.N; ++i) {
    for (const auto& g : phi) st.phi[i] += g.derivative(0, cfg.x(i));
    for (const auto& g : pi) st.pi[i] += g.derivative(0, cfg.x(i));
  }
  return st;
}

StateProfile random_state_profile(Rng& rng) {
  // Widths and centers keep the tails below 1e-13 at |x| = 8.
  StateProfile p;
  auto bump = [&] {
    GaussianProfile g;
    g.poly = {0.5 + rng.uniform()};
    if (rng.coin()) g.poly[0] = -g.poly[0];
    const double width = 0.8 + 0.1 * rng.uniform();
    g.a = 1.0 / (2.0 * width * width);
    g.c = rng.uniform() - 0.5;
    return g;
  };
  for (int k = 0; k < 2; ++k) {
    p.phi.push_back(bump());
    p.pi.push_back(bump());
  }
  return p;
}

std::vector<double> lattice_derivative(const LatticeConfig& cfg, const std::vector<double>& u,
                                       int k) {
  const int N = cfg.N;
  const double h = cfg.dx();
  auto at = [&](const std::vector<double>& v, int i) { return v[((i % N) + N) % N]; };
  auto d1 = [&](const std::vector<double>& v) {
    std::vector<double> r(N);
    for (int i = 0; i < N; ++i)
      r[i] = cfg.stencil == 2
                 ? (at(v, i + 1) - at(v, i - 1)) / (2 * h)
                 : (-at(v, i + 2) + 8 * at(v, i + 1) - 8 * at(v, i - 1) + at(v, i - 2)) / (12 * h);
    return r;
  };
  auto d2 = [&](const std::vector<double>& v) {
    std::vector<double> r(N);
    for (int i = 0; i < N; ++i)
      r[i] = cfg.stencil == 2
                 ? (at(v, i + 1) - 2 * v[i] + at(v, i - 1)) / (h * h)
                 : (-at(v, i + 2) + 16 * at(v, i + 1) - 30 * v[i] + 16 * at(v, i - 1) -
                    at(v, i - 2)) /
                       (12 * h * h);
    return r;
  };
  std::vector<double> r = u;
  for (int t = 0; t < k / 2; ++t) r = d2(r);
  if (k % 2) r = d1(r);
  return r;
}

struct LatticeFunctional::Prepared {
  // (kind, order) -> discrete derivative of the field
  std::map<std::pair<KindCode, int>, std::vector<double>> fields;
};

LatticeFunctional::LatticeFunctional(const Session& s, const Symbol& sym, const LatticeConfig& cfg,
                                     const Binding& bind)
    : s_(&s), terms_(sym.terms()), cfg_(cfg) {
  cfg_.validate();
  if (s.dimension() != 1) throw Error(ErrorCode::Usage, "the lattice oracle is one-dimensional");
  for (const auto& t : terms_) {
    if (t.f.divergent())
      throw Error(ErrorCode::Divergent, "divergent constants have no numeric value");
    if (t.f.h || t.f.i)
      throw Error(ErrorCode::Domain, "the lattice oracle evaluates real classical symbols only");
    coef_.push_back(t.c.get_d() * std::pow(bind.mass, t.f.m));
    for (const auto& f : t.funcs) {
      auto key = std::make_pair(f.kind, static_cast<int>(f.d.v[0]));
      if (func_values_.count(key)) continue;
      const std::string name = s.kind_name(f.kind);
      auto it = bind.functions.find(name);
      if (it == bind.functions.end())
        throw Error(ErrorCode::Domain, "no numeric binding for function '" + name + "'");
      std::vector<double> v(cfg_.N);
      for (int i = 0; i < cfg_.N; ++i) v[i] = it->second.derivative(key.second, cfg_.x(i));
      func_values_[key] = std::move(v);
    }
  }
}

double LatticeFunctional::operator()(const LatticeState& st,
                                     const std::map<int, int>& free_index) const {
  Prepared p;
  for (const auto& t : terms_)
    for (const auto& f : t.fields) {
      auto key = std::make_pair(f.kind, static_cast<int>(f.d.v[0]));
      if (!p.fields.count(key))
        p.fields[key] = lattice_derivative(cfg_, f.kind == kPhi ? st.phi : st.pi, key.second);
    }
  double total = 0;
  for (std::size_t k = 0; k < terms_.size(); ++k)
    total += coef_[k] * term_value(terms_[k], p, free_index);
  return total;
}

double LatticeFunctional::term_value(const Term& t, const Prepared& p,
                                     const std::map<int, int>& free_index) const {
  const int N = cfg_.N;
  const double h = cfg_.dx();
  auto fixed_index = [&](Var v) -> int {
    if (v.is_origin()) return cfg_.origin();
    auto it = free_index.find(v.id);
    if (it == free_index.end())
      throw Error(ErrorCode::Usage, "free variable " + variable_name(v.id) + " has no grid point");
    return it->second;
  };
  auto value = [&](const Factor& f) -> const std::vector<double>& {
    auto key = std::make_pair(f.kind, static_cast<int>(f.d.v[0]));
    return is_field(f.kind) ? p.fields.at(key) : func_values_.at(key);
  };
  // Kernel row/column of delta^(k): (D^k)_{ij} / dx.
  auto kernel_entry = [&](int k, int i, int j) {
    std::vector<double> e(N, 0.0);
    e[j] = 1.0;
    return lattice_derivative(cfg_, e, k)[i] / h;
  };

  double scalar = 1.0;
  std::vector<std::vector<double>> node(t.nd, std::vector<double>(N, 1.0));
  for (const auto& f : t.fields) {
    const auto& v = value(f);
    if (f.arg.is_dummy()) {
      for (int i = 0; i < N; ++i) node[f.arg.id][i] *= v[i];
    } else {
      scalar *= v[fixed_index(f.arg)];
    }
  }
  for (const auto& f : t.funcs) {
    const auto& v = value(f);
    if (f.arg.is_dummy()) {
      for (int i = 0; i < N; ++i) node[f.arg.id][i] *= v[i];
    } else {
      scalar *= v[fixed_index(f.arg)];
    }
  }

  std::vector<Delta> inner;
  for (const auto& d : t.deltas) {
    const int k = d.d.v[0];
    const bool ld = d.left.is_dummy(), rd = d.right.is_dummy();
    if (!ld && !rd) {
      scalar *= kernel_entry(k, fixed_index(d.left), fixed_index(d.right));
    } else if (ld && rd) {
      inner.push_back(d);
    } else {
      // column j fixed: K(i, j) over i is (D^k e_j)(i) / dx; row i fixed:
      // K(i, j) over j is (-1)^k (D^k e_i)(j) / dx for the periodic stencils.
      const Var dv = ld ? d.left : d.right;
      const int w = fixed_index(ld ? d.right : d.left);
      std::vector<double> e(N, 0.0);
      e[w] = 1.0;
      std::vector<double> col = lattice_derivative(cfg_, e, k);
      const double sg = ld ? 1.0 : ((k % 2) ? -1.0 : 1.0);
      for (int i = 0; i < N; ++i) node[dv.id][i] *= sg * col[i] / h;
    }
  }

  std::vector<bool> alive(t.nd, true);
  // Leaf elimination along dummy-dummy deltas.
  bool progress = true;
  while (!inner.empty() && progress) {
    progress = false;
    for (int x = 0; x < t.nd && !progress; ++x) {
      if (!alive[x]) continue;
      int count = 0;
      std::size_t which = 0;
      for (std::size_t e = 0; e < inner.size(); ++e)
        if (inner[e].left.id == x || inner[e].right.id == x) ++count, which = e;
      if (count != 1) continue;
      const Delta d = inner[which];
      const int k = d.d.v[0];
      const bool x_left = d.left.id == x;
      const int y = x_left ? d.right.id : d.left.id;
      if (y == x) continue;
      // sum_i dx n_x(i) K(i, j) = (-1)^k (D^k n_x)(j);  sum_i dx n_x(i) K(j, i) = (D^k n_x)(j)
      std::vector<double> m = lattice_derivative(cfg_, node[x], k);
      const double sg = x_left && (k % 2) ? -1.0 : 1.0;
      for (int j = 0; j < N; ++j) node[y][j] *= sg * m[j];
      alive[x] = false;
      inner.erase(inner.begin() + static_cast<std::ptrdiff_t>(which));
      progress = true;
    }
  }
  if (!inner.empty()) {
    // Cycles: brute force over the remaining coupled pair.
    if (inner.size() > 2) throw Error(ErrorCode::Usage, "delta graph too entangled for the oracle");
    const int a = inner[0].left.id, b = inner[0].right.id;
    for (const auto& d : inner)
      if (!((d.left.id == a && d.right.id == b) || (d.left.id == b && d.right.id == a)))
        throw Error(ErrorCode::Usage, "delta graph too entangled for the oracle");
    double sum = 0;
    std::vector<std::vector<double>> K;
    for (const auto& d : inner) {
      std::vector<double> dense(static_cast<std::size_t>(N) * N);
      for (int j = 0; j < N; ++j) {
        std::vector<double> e(N, 0.0);
        e[j] = 1.0;
        auto col = lattice_derivative(cfg_, e, d.d.v[0]);
        for (int i = 0; i < N; ++i) dense[static_cast<std::size_t>(i) * N + j] = col[i] / h;
      }
      K.push_back(std::move(dense));
    }
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double v = h * h * node[a][i] * node[b][j];
        for (std::size_t e = 0; e < inner.size(); ++e) {
          const bool fwd = inner[e].left.id == a;
          v *= fwd ? K[e][static_cast<std::size_t>(i) * N + j] : K[e][static_cast<std::size_t>(j) * N + i];
        }
        sum += v;
      }
    alive[a] = alive[b] = false;
    scalar *= sum;
  }
  for (int x = 0; x < t.nd; ++x) {
    if (!alive[x]) continue;
    double s = 0;
    for (int i = 0; i < N; ++i) s += node[x][i];
    scalar *= h * s;
  }
  return scalar;
}

void LatticeFunctional::gradient(const LatticeState& st, std::vector<double>& dphi,
                                 std::vector<double>& dpi) const {
  double scale = 0;
  for (double v : st.phi) scale = std::max(scale, std::abs(v));
  for (double v : st.pi) scale = std::max(scale, std::abs(v));
  if (scale == 0) scale = 1;
  const double step = 1e-5 * scale;
  LatticeState work = st;
  auto diff = [&](std::vector<double>& comp, std::vector<double>& out) {
    out.assign(comp.size(), 0.0);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const double keep = comp[i];
      // 4-point central difference: exact for functionals of degree <= 4
      double f[4];
      const double at[4] = {2, 1, -1, -2};
      for (int k = 0; k < 4; ++k) {
        comp[i] = keep + at[k] * step;
        f[k] = (*this)(work);
      }
      comp[i] = keep;
      out[i] = (8 * (f[1] - f[2]) - (f[0] - f[3])) / (12 * step);
    }
  };
  diff(work.phi, dphi);
  diff(work.pi, dpi);
}

double numeric_bracket(const LatticeFunctional& F, const LatticeFunctional& G,
                       const LatticeState& st, double* scale) {
  std::vector<double> fphi, fpi, gphi, gpi;
  F.gradient(st, fphi, fpi);
  G.gradient(st, gphi, gpi);
  const double h = F.config().dx();
  double sum = 0, mag = 0;
  for (std::size_t i = 0; i < fphi.size(); ++i) {
    sum += (fpi[i] * gphi[i] - fphi[i] * gpi[i]) / h;
    mag += (std::abs(fpi[i] * gphi[i]) + std::abs(fphi[i] * gpi[i])) / h;
  }
  if (scale) *scale = mag;
  return sum;
}

std::string BracketVerification::csv() const {
  std::ostringstream os;
  os << "N,dx,error\n" << std::setprecision(10);
  for (const auto& r : rows) os << r.N << "," << r.dx << "," << r.error << "\n";
  return os.str();
}

std::string BracketVerification::json() const {
  Json j;
  Json rs = Json::array();
  for (const auto& r : rows) {
    Json x;
    x["N"] = r.N;
    x["dx"] = r.dx;
    x["error"] = r.error;
    rs.push_back(x);
  }
  j["rows"] = rs;
  j["exact"] = exact;
  if (!exact) j["order"] = order;
  return j.dump(2);
}

BracketVerification verify_bracket(const Session& s, const Symbol& a, const Symbol& b,
                                   const std::vector<LatticeConfig>& cfgs, const Binding& bind,
                                   const std::vector<StateProfile>& states) {
  const Symbol br = bracket(s, a, b);
  BracketVerification v;
  for (const auto& cfg : cfgs) {
    LatticeFunctional F(s, a, cfg, bind), G(s, b, cfg, bind), B(s, br, cfg, bind);
    ConvergenceRow row;
    row.N = cfg.N;
    row.dx = cfg.dx();
    for (const auto& sp : states) {
      LatticeState st = sp.sample(cfg);
      double mag = 0;
      const double num = numeric_bracket(F, G, st, &mag);
      const double sym = B(st);
      const double err = mag > 0 ? std::abs(num - sym) / mag : std::abs(num - sym);
      row.error = std::max(row.error, err);
    }
    v.rows.push_back(row);
  }
  bool all_small = true;
  for (const auto& r : v.rows) all_small &= r.error < BracketVerification::kNoiseFloor;
  v.exact = all_small;
  if (!v.exact && v.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(v.rows.size());
    for (const auto& r : v.rows) {
      const double lx = std::log(static_cast<double>(r.N));
      const double ly = std::log(std::max(r.error, 1e-300));
      sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    v.order = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return v;
}

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k], sy += y[k], sxx += x[k] * x[k], sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

OracleStudy oracle_study(const Session& s, const OracleOptions& opt) {
  if (opt.grid.size() < 2) throw Error(ErrorCode::Usage, "need at least two resolutions");
  Rng rng(opt.seed);
  std::vector<StateProfile> states;
  for (int k = 0; k < opt.states; ++k) states.push_back(random_state_profile(rng));
  std::vector<LatticeConfig> cfgs;
  for (int n : opt.grid) cfgs.push_back({n, opt.L, opt.stencil});
  const Binding bind = Binding::defaults(s);
  SymbolShape shape;
  shape.max_deriv = 1;

  OracleStudy st;
  std::vector<double> pooled(cfgs.size(), 0.0);
  st.min_order = 1e300;
  for (int p = 0; p < opt.pairs; ++p) {
    const Symbol a = random_symbol(s, rng, shape);
    const Symbol b = random_symbol(s, rng, shape);
    OraclePair pr{format(s, a, FormatStyle::Compact), format(s, b, FormatStyle::Compact),
                  verify_bracket(s, a, b, cfgs, bind, states)};
    const auto& v = pr.verification;
    st.worst_error = std::max(st.worst_error, v.finest_error());
    for (std::size_t k = 0; k < cfgs.size(); ++k) pooled[k] = std::max(pooled[k], v.rows[k].error);
    if (v.exact) ++st.exact_pairs;
    else st.min_order = std::min(st.min_order, v.order);
    st.pairs.push_back(std::move(pr));
  }
  if (st.exact_pairs == static_cast<int>(st.pairs.size())) st.min_order = 0;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    x.push_back(std::log(static_cast<double>(cfgs[k].N)));
    y.push_back(std::log(std::max(pooled[k], 1e-300)));
  }
  st.pooled_order = -slope(x, y);
  return st;
}

std::string OracleStudy::json() const {
  Json j;
  j["worst_error"] = worst_error;
  j["pooled_order"] = pooled_order;
  j["min_order"] = min_order;
  j["exact_pairs"] = exact_pairs;
  Json ps = Json::array();
  for (const auto& p : pairs) {
    Json x;
    x["a"] = p.a;
    x["b"] = p.b;
    x["verification"] = Json::parse(p.verification.json());
    ps.push_back(x);
  }
  j["pairs"] = ps;
  return j.dump(2);
}

}  // namespace hamalg
