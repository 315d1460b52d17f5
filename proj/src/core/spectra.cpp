// SPDX-License-Identifier: Apache-2.0
#include "core/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gf {

namespace {

using i128 = __int128;

Rational make(i128 n, i128 d) {
  if (d == 0) fail_invalid("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    const i128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  constexpr i128 lim = static_cast<i128>(std::numeric_limits<long long>::max());
  if (n > lim || -n > lim || d > lim) fail_invalid("rational overflow");
  Rational r;
  r.num = static_cast<long long>(n);
  r.den = static_cast<long long>(d);
  return r;
}

}  // namespace

Rational::Rational(long long n, long long d) { *this = make(n, d); }

std::string Rational::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den, static_cast<i128>(a.den) * b.den);
}
Rational operator-(const Rational& a) { return make(-static_cast<i128>(a.num), a.den); }
Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<i128>(a.num) * b.num, static_cast<i128>(a.den) * b.den);
}

Rational parse_rational(const std::string& text) {
  try {
    if (auto slash = text.find('/'); slash != std::string::npos)
      return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    if (auto dot = text.find('.'); dot != std::string::npos) {
      const std::string frac = text.substr(dot + 1);
      if (frac.size() > 17) fail_invalid("too many decimal digits in " + text);
      long long scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      const std::string whole = text.substr(0, dot);
      const bool neg = !whole.empty() && whole[0] == '-';
      const long long w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
      const long long f = frac.empty() ? 0 : std::stoll(frac);
      return Rational(w, 1) + Rational(neg ? -f : f, scale);
    }
    return Rational(std::stoll(text), 1);
  } catch (const std::logic_error&) {
    fail_invalid("not a rational number: " + text);
  }
}

std::optional<double> segment_energy(const Lambda0Table& t, int m) { return t.lookup(chain_length_for_segment(m)); }

namespace {

int floor_log4(long long x) {
  int n = 0;
  long long p = 4;
  while (p <= x) {
    ++n;
    if (p > std::numeric_limits<long long>::max() / 4) break;
    p *= 4;
  }
  return n;
}

double required(const Lambda0Table& t, int m) {
  const auto v = segment_energy(t, m);
  if (!v) fail_invalid("missing lambda0 entry for segment side 4^" + std::to_string(m) + " (chain length " +
                       std::to_string(chain_length_for_segment(m)) + ")");
  return *v;
}

// Segment sides 4^m (m >= 1) present in the table, with their lambda0.
std::vector<std::pair<long long, double>> table_sides(const Lambda0Table& t) {
  std::vector<std::pair<long long, double>> out;
  for (int m = 1; m <= 15; ++m)
    if (auto v = segment_energy(t, m)) out.emplace_back(static_cast<long long>(ipow(4, static_cast<unsigned>(m))), *v);
  return out;
}

}  // namespace

EnergyBounds gs_energy_bounds(long long L, long long H, const Lambda0Table& t) {
  if (L < 1 || H < 1) fail_invalid("lattice sides must be positive");
  EnergyBounds b;
  const int lo = floor_log4(std::min(L, H)), hi = floor_log4(std::max(L, H));
  for (int n = 1; n <= hi; ++n) {
    const SegmentBounds s = segment_bounds(L, H, n);
    if (n <= lo && s.lower != 0) b.lower += static_cast<double>(s.lower) * required(t, n);
    if (s.upper != 0) b.upper += static_cast<double>(s.upper) * required(t, n);
  }
  return b;
}

int input_size(unsigned long long n) { return static_cast<int>(binary_string(n).size()); }

SeriesPair alpha_series(unsigned long long n, const Lambda0Table& t) {
  SeriesPair a;
  const long long cap = input_size(n) + 6;
  for (const auto& [r, lam] : table_sides(t)) {
    if (r > cap) continue;
    a.second += lam / static_cast<double>(r * r);
    a.first += 2.0 * lam / static_cast<double>(r);
  }
  return a;
}

SeriesPair delta_series(unsigned long long n, std::optional<long long> r1, const Lambda0Table& t) {
  SeriesPair d;
  d.first = 1.0;
  const long long cap = input_size(n) + 6;
  for (const auto& [r, lam] : table_sides(t)) {
    const bool late = r1 && r >= *r1;
    if (late) d.second += lam / static_cast<double>(r * r);
    if (late || r <= cap) d.first += 2.0 * lam / static_cast<double>(r);
  }
  return d;
}

long long halting_segment(unsigned long long n, long long steps) {
  const long long need = input_size(n) + 6 + std::max(0LL, steps);
  long long r = 4;
  while (r < need) r *= 4;
  return r;
}

ShiftedHu shifted_hu(const TermPtr& hf, const Rational& beta, const Rational& alpha2) {
  if (beta.num <= 0) fail_invalid("beta must be positive");
  ShiftedHu s;
  s.beta = beta;
  s.alpha2 = alpha2;
  const std::size_t d = hf->site_dim();
  s.one_site = identity_term(1, d, (-beta * Rational(1, 2)).value(), "site_shift");
  s.plaquette = sum_terms({{beta.value(), hf}, {(-beta * (alpha2 - Rational(1))).value(), identity_term(4, d)}}, "h_u");
  return s;
}

Rational total_shift_lattice(int L, const Rational& beta, const Rational& alpha2) {
  const Lattice lat = build_lattice(L, L);
  Rational total;
  const Rational site = -beta * Rational(1, 2), plaq = -beta * (alpha2 - Rational(1));
  for (int i = 0; i < lat.num_sites; ++i) total = total + site;
  for (std::size_t q = 0; q < lat.plaquettes.size(); ++q) total = total + plaq;
  return total;
}

Rational total_shift_formula(int L, const Rational& beta, const Rational& alpha2) {
  const Rational l(L);
  return -beta * l * (l + Rational(1)) - l * l * beta * (alpha2 - Rational(1));
}

namespace {

Eigen::MatrixXcd bond_matrix() {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(4, 4);
  b(0, 0) = b(3, 3) = -0.25;
  b(1, 1) = b(2, 2) = 0.25;
  b(1, 2) = b(2, 1) = -0.5;
  return b;
}

// Bond on sites (i, j) of an n-qubit register, site 0 most significant.
void add_bond(SparseOperator& op, int n, int i, int j) {
  const std::uint64_t dim = 1ULL << n;
  for (std::uint64_t c = 0; c < dim; ++c) {
    const int a = static_cast<int>((c >> (n - 1 - i)) & 1), b = static_cast<int>((c >> (n - 1 - j)) & 1);
    op.add(c, c, a == b ? -0.25 : 0.25);
    if (a != b) op.add(c ^ (1ULL << (n - 1 - i)) ^ (1ULL << (n - 1 - j)), c, -0.5);
  }
}

}  // namespace

TermPtr heisenberg_bond() { return dense_term(2, 2, bond_matrix(), "heisenberg_bond"); }

TermPtr heisenberg_plaquette() {
  SparseOperator op(16);
  for (int i = 0; i < 4; ++i) add_bond(op, 4, i, (i + 1) % 4);
  op.shift(1.0);
  op.canonicalize();
  return dense_term(4, 2, op.to_dense(), "heisenberg_plaquette");
}

double heisenberg_torus_energy_per_site(int Lx, int Ly) {
  const int n = Lx * Ly;
  if (n < 2 || n > 16) fail_budget("torus limited to 2..16 sites");
  SparseOperator op(1ULL << n);
  for (int y = 0; y < Ly; ++y)
    for (int x = 0; x < Lx; ++x) {
      const int s = y * Lx + x;
      add_bond(op, n, s, y * Lx + (x + 1) % Lx);
      add_bond(op, n, s, ((y + 1) % Ly) * Lx + x);
    }
  op.canonicalize();
  return low_spectrum(op, 1, 1e-12).values.front() / n;
}

std::vector<double> heisenberg_lattice_spectrum(int L, int k) {
  const Lattice lat = build_lattice(L, L);
  if (lat.num_sites > 12) fail_budget("Heisenberg lattice spectrum limited to 12 sites");
  const auto op = assemble_hamiltonian(lat, nullptr, heisenberg_plaquette());
  return low_spectrum(op, k, 1e-10).values;
}

namespace {

class PromiseTerm final : public LocalTerm {
 public:
  static constexpr unsigned kGuard = 1, kD = 2, kU = 4;
  PromiseTerm(std::size_t du, std::size_t dd, TermPtr hu, TermPtr hd, unsigned mask, const std::string& tag)
      : LocalTerm(4, 1 + du * dd, tag), du_(du), dd_(dd), hu_(std::move(hu)), hd_(std::move(hd)), mask_(mask) {}

  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    const std::size_t D = site_dim();
    std::array<std::size_t, 4> s{};
    std::uint64_t c = col;
    for (int i = 3; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] = c % D;
      c /= D;
    }
    if (mask_ & kGuard) {
      // Cyclic (a,b,c,d): guard at a with b,c,d in the ud sector, or the reverse.
      double v = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        const bool g0 = s[j] == 0, g1 = s[(j + 1) % 4] == 0, g2 = s[(j + 2) % 4] == 0, g3 = s[(j + 3) % 4] == 0;
        if (g0 && !g1 && !g2 && !g3) v += 1.0;
        if (!g0 && g1 && g2 && g3) v += 1.0;
      }
      if (v != 0.0) out.push_back({col, v});
    }
    if (s[0] == 0 || s[1] == 0 || s[2] == 0 || s[3] == 0) return;
    std::array<std::size_t, 4> u{}, d{};
    for (std::size_t i = 0; i < 4; ++i) {
      u[i] = (s[i] - 1) / dd_;
      d[i] = (s[i] - 1) % dd_;
    }
    auto lift = [&](const std::array<std::size_t, 4>& uu, const std::array<std::size_t, 4>& ddd) {
      std::uint64_t r = 0;
      for (std::size_t i = 0; i < 4; ++i) r = r * D + 1 + uu[i] * dd_ + ddd[i];
      return r;
    };
    auto pack = [](const std::array<std::size_t, 4>& x, std::size_t base) {
      std::uint64_t r = 0;
      for (std::size_t i = 0; i < 4; ++i) r = r * base + x[i];
      return r;
    };
    auto unpack = [](std::uint64_t r, std::size_t base) {
      std::array<std::size_t, 4> x{};
      for (int i = 3; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] = static_cast<std::size_t>(r % base);
        r /= base;
      }
      return x;
    };
    if (mask_ & kD) {
      buf_.clear();
      hd_->column(pack(d, dd_), buf_);
      for (const auto& e : buf_) out.push_back({lift(u, unpack(e.row, dd_)), e.val});
    }
    if (mask_ & kU) {
      buf_.clear();
      hu_->column(pack(u, du_), buf_);
      for (const auto& e : buf_) out.push_back({lift(unpack(e.row, du_), d), e.val});
    }
  }

 private:
  std::size_t du_, dd_;
  TermPtr hu_, hd_;
  unsigned mask_;
  static thread_local std::vector<Entry> buf_;
};

thread_local std::vector<Entry> PromiseTerm::buf_;

}  // namespace

PromiseHamiltonian build_promise_hamiltonian(const TermPtr& hu_plaquette, const TermPtr& hd_plaquette, double beta,
                                             double alpha2, std::uint64_t budget) {
  if (hu_plaquette->arity() != 4 || hd_plaquette->arity() != 4) fail_invalid("promise components must be plaquette terms");
  PromiseHamiltonian ph;
  ph.du = hu_plaquette->site_dim();
  ph.dd = hd_plaquette->site_dim();
  ph.D = 1 + ph.du * ph.dd;
  if (static_cast<double>(ph.D) * ph.D * ph.D * ph.D > static_cast<double>(budget))
    fail_budget("promise plaquette dimension " + std::to_string(ph.D) + "^4 exceeds budget " + std::to_string(budget));
  ph.beta = beta;
  ph.alpha2 = alpha2;
  ph.hu_plaquette = hu_plaquette;
  ph.hd_plaquette = hd_plaquette;
  ph.h0 = std::make_shared<PromiseTerm>(ph.du, ph.dd, hu_plaquette, hd_plaquette, PromiseTerm::kGuard, "h_0");
  ph.hd = std::make_shared<PromiseTerm>(ph.du, ph.dd, hu_plaquette, hd_plaquette, PromiseTerm::kD, "h_d");
  ph.hu = std::make_shared<PromiseTerm>(ph.du, ph.dd, hu_plaquette, hd_plaquette, PromiseTerm::kU, "h_u");
  ph.plaquette = std::make_shared<PromiseTerm>(ph.du, ph.dd, hu_plaquette, hd_plaquette, 7u, "h");
  std::vector<double> site(ph.D, -beta * (1.0 + alpha2));
  site[0] = 0.0;
  ph.one_site = diagonal_term(1, ph.D, site, "one_site");
  return ph;
}

PromiseChecks check_promise_plaquette(const PromiseHamiltonian& ph, double tol) {
  const Lattice lat = build_lattice(1, 1);
  auto dense = [&](const TermPtr& one, const TermPtr& plaq) { return assemble_hamiltonian(lat, one, plaq).to_dense(); };
  const Eigen::MatrixXcd H0 = dense(nullptr, ph.h0), Hd = dense(nullptr, ph.hd), Hu = dense(ph.one_site, ph.hu);
  auto comm = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a * b - b * a).cwiseAbs().maxCoeff(); };
  PromiseChecks c;
  c.commutator_0d = comm(H0, Hd);
  c.commutator_0u = comm(H0, Hu);
  c.commutator_ud = comm(Hu, Hd);
  const Eigen::MatrixXcd H = H0 + Hd + Hu;
  c.guard_residual = H.col(0).norm();

  std::vector<double> h0;
  for (Eigen::Index i = 0; i < H0.rows(); ++i) h0.push_back(H0(i, i).real());
  std::sort(h0.begin(), h0.end());
  c.h0_ground = h0.front();
  c.h0_multiplicity = ground_multiplicity(h0, tol);
  c.h0_gap = 0.0;
  for (double v : h0)
    if (v > h0.front() + tol) {
      c.h0_gap = v - h0.front();
      break;
    }

  const auto full = dense_spectrum(H, static_cast<int>(H.rows()), false).values;
  // All-ud sector: spec(H_u) + spec(H_d) with the one-site shift on the four sites; the guard state gives 0.
  const double site = -ph.beta * (1.0 + ph.alpha2);
  const auto su = dense_spectrum(to_dense(*ph.hu_plaquette), static_cast<int>(ph.hu_plaquette->dim()), false).values;
  const auto sd = dense_spectrum(to_dense(*ph.hd_plaquette), static_cast<int>(ph.hd_plaquette->dim()), false).values;
  std::vector<double> sums{0.0};
  for (double a : su)
    for (double b : sd) sums.push_back(a + b + 4.0 * site);
  c.containment_error = 0.0;
  for (double v : sums) {
    const auto it = std::lower_bound(full.begin(), full.end(), v);
    double best = std::numeric_limits<double>::infinity();
    if (it != full.end()) best = std::abs(*it - v);
    if (it != full.begin()) best = std::min(best, std::abs(*std::prev(it) - v));
    c.containment_error = std::max(c.containment_error, best);
  }
  c.sums_checked = sums.size();
  c.spectrum.assign(full.begin(), full.begin() + static_cast<long>(std::min<std::size_t>(full.size(), 32)));
  return c;
}

TermPtr random_invariant_plaquette(std::size_t d, unsigned seed) {
  if (d < 1 || d > 6) fail_invalid("random plaquette site dimension must be 1..6");
  const auto n = static_cast<Eigen::Index>(ipow(d, 4));
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  Eigen::MatrixXcd m = a * a.adjoint() / static_cast<double>(n);
  m = (m + m.adjoint()).eval() * 0.5;
  TermPtr t = dense_term(4, d, m, "random");
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < 4; ++j) {
    avg += to_dense(*t);
    t = rotate_plaquette_term(t);
  }
  return dense_term(4, d, avg * 0.25, "random_invariant");
}

json GapReport::to_json() const {
  json j;
  j["schema"] = "gapforge-gap-report/1";
  j["n"] = n;
  j["machine"] = machine;
  j["verdict_source"] = verdict_source;
  j["halted"] = halted;
  j["steps"] = steps;
  j["step_budget"] = step_budget;
  j["r1"] = r1 ? json(*r1) : json(nullptr);
  j["beta"] = beta;
  j["alpha"] = {{"alpha1", alpha.first}, {"alpha2", alpha.second}};
  j["delta"] = {{"delta1", delta.first}, {"delta2", delta.second}};
  j["L_threshold"] = L_threshold ? json(*L_threshold) : json(nullptr);
  j["cells"] = json::array();
  for (const auto& c : cells) {
    json cj{{"L", c.L}, {"bound", c.bound}, {"above_threshold", c.above_threshold}};
    if (!c.low.empty()) {
      cj["low"] = c.low;
      cj["spacing"] = c.spacing;
    }
    j["cells"].push_back(cj);
  }
  j["classification"] = classification;
  j["notes"] = notes;
  return j;
}

namespace {

double mean_spacing(const std::vector<double>& v, double tol = 1e-9) {
  std::vector<double> distinct;
  for (double x : v)
    if (distinct.empty() || x > distinct.back() + tol) distinct.push_back(x);
  if (distinct.size() < 2) return 0.0;
  return (distinct.back() - distinct.front()) / static_cast<double>(distinct.size() - 1);
}

}  // namespace

GapReport classify_gap(const TuringMachine& m, unsigned long long n, const std::vector<int>& L_list,
                       long long step_budget, const Lambda0Table& t, double beta) {
  if (beta <= 0.0) fail_invalid("beta must be positive");
  if (step_budget < 0) fail_invalid("step budget must be non-negative");
  for (int L : L_list)
    if (L < 1) fail_invalid("lattice sizes must be positive");
  GapReport r;
  r.n = n;
  r.machine = m.name;
  r.step_budget = step_budget;
  r.beta = beta;
  const RunResult run = run_tm(m, binary_string(n), step_budget, 1 << 20);
  r.halted = run.halted;
  r.steps = run.steps;
  r.alpha = alpha_series(n, t);
  if (r.halted) r.r1 = halting_segment(n, r.steps);
  r.delta = delta_series(n, r.r1, t);
  if (L_list.empty()) {
    r.notes.push_back("no lattice sizes given");
    return r;
  }

  if (r.halted) {
    r.notes.push_back("gap bound assumes a rigid tiling layer; the bundled tile set is not rigid");
    if (r.delta.second <= 0.0) {
      r.notes.push_back("no lambda0 entry at or beyond the halting segment side " + std::to_string(*r.r1));
      for (int L : L_list) r.cells.push_back({L, 0.0, false, {}, 0.0});
      return r;
    }
    // Smallest L with L^2 delta2 - L delta1 >= 1/beta.
    const double d1 = r.delta.first, d2 = r.delta.second;
    auto ok = [&](long long L) { return static_cast<double>(L * L) * d2 - static_cast<double>(L) * d1 >= 1.0 / beta; };
    long long L0 = std::max(1LL, static_cast<long long>(std::floor((d1 + std::sqrt(d1 * d1 + 4.0 * d2 / beta)) / (2.0 * d2))));
    while (L0 > 1 && ok(L0 - 1)) --L0;
    while (!ok(L0)) ++L0;
    r.L_threshold = L0;
    bool all = true;
    for (int L : L_list) {
      GapCell c;
      c.L = L;
      c.bound = beta * (static_cast<double>(L) * L * d2 - static_cast<double>(L) * d1);
      c.above_threshold = L >= L0;
      all = all && c.above_threshold;
      r.cells.push_back(c);
    }
    if (all) r.classification = "gapped";
    else r.notes.push_back("some tested L lie below the threshold " + std::to_string(L0));
    return r;
  }

  r.notes.push_back("machine did not halt within the step budget");
  bool all = true;
  std::vector<double> spacings;
  for (int L : L_list) {
    GapCell c;
    c.L = L;
    // Upper value of the shifted ground energy without a halting segment.
    c.bound = beta * static_cast<double>(L) * (r.alpha.first - 1.0);
    c.above_threshold = c.bound <= -0.75 * beta * L;
    all = all && c.above_threshold;
    if (L <= 2) {
      c.low = heisenberg_lattice_spectrum(L, 40);
      c.spacing = mean_spacing(c.low);
      spacings.push_back(c.spacing);
    }
    r.cells.push_back(c);
  }
  bool shrinking = spacings.size() >= 2;
  for (std::size_t i = 1; i < spacings.size(); ++i) shrinking = shrinking && spacings[i] < spacings[i - 1];
  if (all && shrinking) r.classification = "gapless-consistent";
  else if (!shrinking) r.notes.push_back("spacing trend needs at least two witness sizes with L <= 2");
  return r;
}

EnergyDensity energy_density(const std::vector<std::pair<int, double>>& lambda0_by_L) {
  EnergyDensity e;
  for (const auto& [L, lam] : lambda0_by_L) {
    if (L < 1) fail_invalid("lattice sizes must be positive");
    e.series.emplace_back(L, lam / (2.0 * L * (L + 1.0)));
  }
  if (!e.series.empty()) e.estimate = e.series.back().second;
  return e;
}

}  // namespace gf
