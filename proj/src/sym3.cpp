#include "symcube/sym3.hpp"

#include "symcube/errors.hpp"
#include "symcube/factor.hpp"

#include <algorithm>
#include <numeric>

namespace symcube {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

Integer power(const Integer &base, unsigned long e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

// Index of the unknown J[i][j], i < j, in the 6-vector of unknowns.
constexpr int kPairIndex[4][4] = {
    {-1, 0, 1, 2},
    {0, -1, 3, 4},
    {1, 3, -1, 5},
    {2, 4, 5, -1},
};

Matrix4 form_from_vector(const std::array<Rational, 6> &x) {
  Matrix4 j;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      if (r == c)
        j[r][c] = 0;
      else if (r < c)
        j[r][c] = x[kPairIndex[r][c]];
      else
        j[r][c] = -x[kPairIndex[r][c]];
    }
  return j;
}

// Null space of the homogeneous system, one basis vector per free column.
std::vector<std::array<Rational, 6>> null_space(std::vector<std::array<Rational, 6>> rows) {
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int col = 0; col < 6 && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0)
      ++pivot;
    if (pivot == rows.size())
      continue;
    std::swap(rows[rank], rows[pivot]);
    const Rational lead = rows[rank][col];
    for (auto &x : rows[rank])
      x /= lead;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0)
        continue;
      const Rational f = rows[r][col];
      for (int k = 0; k < 6; ++k)
        rows[r][k] -= f * rows[rank][k];
    }
    pivot_col.push_back(col);
    ++rank;
  }

  std::vector<std::array<Rational, 6>> basis;
  for (int free = 0; free < 6; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end())
      continue;
    std::array<Rational, 6> v;
    v.fill(0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivot_col.size(); ++r)
      v[pivot_col[r]] = -rows[r][free];
    basis.push_back(v);
  }
  return basis;
}

SimilitudeForm solve_similitude_form() {
  // Generators of GL(2, Q) as a group; the conditions are linear in J.
  const std::vector<Matrix2> gens = {
      Matrix2{{{1, 1}, {0, 1}}}, Matrix2{{{1, 0}, {1, 1}}}, Matrix2{{{2, 0}, {0, 1}}},
      Matrix2{{{1, 0}, {0, 2}}}, Matrix2{{{0, 1}, {1, 0}}}, Matrix2{{{3, 1}, {-2, 5}}},
  };

  std::vector<std::array<Rational, 6>> rows;
  for (const Matrix2 &g : gens) {
    const Matrix4 s = sym3_matrix(g);
    const Rational d = determinant(g);
    const Rational scale = d * d * d;
    // Column k of the linear map J -> s^T J s - scale J, evaluated on the
    // basis element with a single unknown set to 1.
    std::array<Matrix4, 6> images;
    for (int k = 0; k < 6; ++k) {
      std::array<Rational, 6> e;
      e.fill(0);
      e[k] = 1;
      const Matrix4 basis = form_from_vector(e);
      const Matrix4 lhs = transpose(s) * basis * s;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          images[k][r][c] = lhs[r][c] - scale * basis[r][c];
    }
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        std::array<Rational, 6> row;
        for (int k = 0; k < 6; ++k)
          row[k] = images[k][r][c];
        rows.push_back(row);
      }
  }

  const auto basis = null_space(std::move(rows));
  if (basis.empty())
    throw InternalError("no nonzero antisymmetric form is preserved by sym3 up to det^3");

  // Clear denominators, remove content, make the first nonzero entry positive.
  std::array<Rational, 6> v = basis.front();
  Integer lcm = 1, content = 0;
  for (const Rational &x : v)
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den_mpz_t());
  for (Rational &x : v) {
    x *= lcm;
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), x.get_num_mpz_t());
  }
  const auto first = std::find_if(v.begin(), v.end(), [](const Rational &x) { return x != 0; });
  if (*first < 0)
    content = -content;
  for (Rational &x : v)
    x /= content;

  SimilitudeForm out{form_from_vector(v), 3};
  for (const Matrix2 &g : gens) {
    const Matrix4 s = sym3_matrix(g);
    const Rational d = determinant(g);
    if (transpose(s) * out.form * s != (d * d * d) * out.form)
      throw InternalError("similitude form fails on a generator");
  }
  return out;
}

int unit_order_after_cube(int order) {
  if (order <= 0 || 12 % order != 0)
    throw ClassificationError("character order " + std::to_string(order) +
                              " does not divide 12");
  return order / std::gcd(order, 3);
}

} // namespace

Matrix4 sym3_matrix(const Matrix2 &g) {
  const Rational &a = g[0][0], &b = g[0][1], &c = g[1][0], &d = g[1][1];
  const Rational third(1, 3);
  Matrix4 m;
  m[0] = {a * a * a, a * a * b, a * b * b, -third * b * b * b};
  m[1] = {3 * a * a * c, 2 * a * b * c + a * a * d, 2 * a * b * d + b * b * c, -b * b * d};
  m[2] = {3 * a * c * c, 2 * a * c * d + b * c * c, 2 * b * c * d + a * d * d, -b * d * d};
  m[3] = {-3 * c * c * c, -3 * c * c * d, -3 * c * d * d, d * d * d};
  return m;
}

const SimilitudeForm &sym3_similitude_form() {
  static const SimilitudeForm form = solve_similitude_form();
  return form;
}

// ---------------------------------------------------------------------------

std::string to_string(RepType t) {
  switch (t) {
  case RepType::Unramified:
    return "unramified";
  case RepType::I:
    return "I";
  case RepType::IVa:
    return "IVa";
  case RepType::VIII:
    return "VIII";
  case RepType::X:
    return "X";
  case RepType::Supercuspidal:
    return "supercuspidal";
  }
  return "?";
}

SignExpr SignExpr::legendre_times_root(int legendre_delta, std::optional<int> w) {
  if (legendre_delta != 1 && legendre_delta != -1)
    throw InputError("Legendre value must be +1 or -1");
  SignExpr s{Kind::LegendreDeltaTimesRoot, legendre_delta, std::nullopt};
  if (w)
    s.resolved = legendre_delta * *w;
  return s;
}

SignExpr SignExpr::minus_root(std::optional<int> w) {
  SignExpr s{Kind::MinusRoot, 0, std::nullopt};
  if (w)
    s.resolved = -*w;
  return s;
}

std::string SignExpr::render() const {
  if (resolved)
    return *resolved > 0 ? "+1" : "-1";
  switch (kind) {
  case Kind::Plus:
    return "+1";
  case Kind::Minus:
    return "-1";
  case Kind::LegendreDeltaTimesRoot:
    return std::string("(D'/3)*w(E/Q_3) = ") + (legendre_delta > 0 ? "" : "-") + "w(E/Q_3)";
  case Kind::MinusRoot:
    return "-w(E/Q_3)";
  }
  return "?";
}

std::string LFactor::render() const {
  const std::string q = p.get_str();
  switch (kind) {
  case Kind::One:
    return "1";
  case Kind::SplitSt:
    return "1/(1 - " + q + "^(-3/2-s))";
  case Kind::NonsplitSt:
    return "1/(1 + " + q + "^(-3/2-s))";
  case Kind::AlphaI:
    return "1/(1 + " + q + "^(-2s))";
  case Kind::UnitaryUndetermined:
    return "1/((1 - a*" + q + "^(-s))(1 - a^(-1)*" + q + "^(-s))), |a| = 1";
  case Kind::Unramified:
    return "unramified of degree 4 at " + q;
  }
  return "?";
}

// ---------------------------------------------------------------------------

int cube_conductor(int a, int unit_order, const Integer &p) {
  const int cubed = unit_order_after_cube(unit_order);
  if (cubed == 1)
    return 0;
  // A ramified character of order prime to p is tame.
  if (!mpz_divisible_p(Integer(cubed).get_mpz_t(), p.get_mpz_t()))
    return 1;
  return a;
}

int sym3_conductor_general(const LocalGL2Data &d, const Integer &p) {
  return std::visit(
      overloaded{
          [](const UnramifiedGood &) { return 0; },
          [&](const TwistedSteinberg &st) {
            if (st.character.is_unramified())
              return 3;
            // chi is quadratic, so chi^3 = chi.
            return 4 * cube_conductor(st.character.conductor_exponent, 2, p);
          },
          [&](const PrincipalSeries &ps) {
            return 2 * cube_conductor(ps.a_chi, ps.chi_unit_order, p) + 2 * ps.a_chi;
          },
          [&](const DihedralSupercuspidal &sc) {
            const int cubed = cube_conductor(sc.a_xi, sc.xi_unit_order, p);
            return sc.field_ramified ? cubed + sc.a_xi + 2 : 2 * cubed + 2 * sc.a_xi;
          },
      },
      d.kind);
}

namespace {

using LK = LFactor::Kind;

Sym3LocalData steinberg_row(const TwistedSteinberg &st, const LocalGL2Data &d,
                            const Integer &p) {
  Sym3LocalData out;
  out.rep_type = RepType::IVa;
  out.l_factor.p = p;
  switch (st.character.kind) {
  case CharKind::Trivial:
    out.conductor_exponent = 3;
    out.epsilon = SignExpr::minus();
    out.l_factor.kind = LK::SplitSt;
    return out;
  case CharKind::UnramifiedNontrivial:
    out.conductor_exponent = 3;
    out.epsilon = SignExpr::plus();
    out.l_factor.kind = LK::NonsplitSt;
    return out;
  case CharKind::Ramified:
    break;
  }
  out.epsilon = SignExpr::plus();
  out.l_factor.kind = LK::One;
  if (p != 2)
    out.conductor_exponent = 4;
  else if (d.conductor_exponent == 4)
    out.conductor_exponent = 8;
  else if (d.conductor_exponent == 6)
    out.conductor_exponent = 12;
  else
    throw ClassificationError("ramified twisted Steinberg at 2 with a(pi) = " +
                              std::to_string(d.conductor_exponent));
  return out;
}

Sym3LocalData large_prime_row(const LocalGL2Data &d, int e, const Integer &p) {
  Sym3LocalData out;
  out.l_factor.p = p;
  if (std::holds_alternative<PrincipalSeries>(d.kind)) {
    out.rep_type = RepType::I;
    out.epsilon = SignExpr::plus();
    out.l_factor.kind = e == 3 ? LK::UnitaryUndetermined : LK::One;
    switch (e) {
    case 2:
    case 4:
    case 6:
      out.conductor_exponent = 4;
      return out;
    case 3:
      out.conductor_exponent = 2;
      return out;
    }
  } else if (std::holds_alternative<DihedralSupercuspidal>(d.kind)) {
    switch (e) {
    case 3:
      return {2, RepType::X, SignExpr::minus(), {LK::AlphaI, p}};
    case 4:
      return {4, RepType::VIII, SignExpr::plus(), {LK::One, p}};
    case 6:
      return {4, RepType::X, SignExpr::plus(), {LK::One, p}};
    }
  }
  throw ClassificationError("no table row for " + kind_name(d.kind) + " with e = " +
                            std::to_string(e) + " at " + p.get_str());
}

Sym3LocalData q3_row(Q3Condition c, const Sym3Context &ctx) {
  const Integer &p = ctx.p;
  switch (c) {
  case Q3Condition::P2:
    return {4, RepType::I, SignExpr::plus(), {LK::One, p}};
  case Q3Condition::P3:
    return {4, RepType::I, SignExpr::plus(), {LK::UnitaryUndetermined, p}};
  case Q3Condition::P6:
    return {6, RepType::I, SignExpr::plus(), {LK::One, p}};
  case Q3Condition::S4:
    return {4, RepType::VIII, SignExpr::plus(), {LK::One, p}};
  case Q3Condition::S3:
    return {4, RepType::X, SignExpr::minus(), {LK::AlphaI, p}};
  case Q3Condition::S6:
    return {6, RepType::X, SignExpr::plus(), {LK::One, p}};
  case Q3Condition::S6prime:
    if (!ctx.legendre_delta)
      throw ClassificationError("S6' requires the Legendre symbol of the discriminant");
    return {5, RepType::Supercuspidal,
            SignExpr::legendre_times_root(*ctx.legendre_delta, ctx.root_number_3),
            {LK::One, p}};
  case Q3Condition::S6doubleprime:
    return {7, RepType::Supercuspidal, SignExpr::minus_root(ctx.root_number_3),
            {LK::One, p}};
  case Q3Condition::P4:
    break;
  }
  throw ClassificationError("condition P4 cannot occur over Q_3");
}

} // namespace

Sym3LocalData sym3_local(const LocalGL2Data &d, const Sym3Context &ctx) {
  if (std::holds_alternative<UnramifiedGood>(d.kind))
    return {0, RepType::Unramified, SignExpr::plus(), {LK::Unramified, ctx.p}};
  if (const auto *st = std::get_if<TwistedSteinberg>(&d.kind))
    return steinberg_row(*st, d, ctx.p);
  if (ctx.p == 3) {
    if (!ctx.q3_condition)
      throw ClassificationError("potentially good at 3 without a table condition");
    return q3_row(*ctx.q3_condition, ctx);
  }
  if (ctx.p >= 5) {
    if (!ctx.e)
      throw ClassificationError("potentially good at " + ctx.p.get_str() + " without e");
    return large_prime_row(d, *ctx.e, ctx.p);
  }
  throw ClassificationError("no table covers " + kind_name(d.kind) + " at 2");
}

// ---------------------------------------------------------------------------

PrimeAnalysis analyze_prime(const Curve &minimal, const Invariants &inv, const Integer &p,
                            const RootNumberProvider &root_number) {
  const Valuation vd = valuation(inv.disc, p);
  if (vd <= 0)
    throw PreconditionError(p.get_str() + " does not divide the discriminant");

  PrimeAnalysis out;
  out.p = p;
  out.v_disc = vd.value();
  out.reduction = reduction_type_assuming_minimal(inv, p);
  out.j_integral = !is_potentially_multiplicative(inv, p);
  if (out.reduction == ReductionType::Good)
    throw PreconditionError("model is not minimal at " + p.get_str());

  Sym3Context ctx{p, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  LocalGL2Data data;
  if (p == 2) {
    P2Classification c = classify_p2(inv, minimal);
    if (auto *u = std::get_if<Unsupported>(&c)) {
      out.gl2 = *u;
      return out;
    }
    data = std::get<LocalGL2Data>(c);
  } else if (!out.j_integral) {
    data = classify_pot_mult(inv, p);
  } else if (p == 3) {
    const Q3Classification c = classify_q3(inv);
    data = c.data;
    out.q3_condition = c.condition;
    out.neron_type = c.row->neron_type;
    const Integer delta_prime = unit_part(Rational(inv.disc), p).get_num();
    out.legendre_delta = legendre(delta_prime, p);
    ctx.q3_condition = c.condition;
    ctx.legendre_delta = out.legendre_delta;
    ctx.root_number_3 = local_root_number_3(minimal, root_number);
  } else {
    const LargePrimeClassification c = classify_pot_good_large_p(inv, p);
    data = c.data;
    out.e = c.e;
    ctx.e = c.e;
  }
  out.gl2 = data;

  if (gl2_conductor_from_parameters(data.kind) != data.conductor_exponent)
    throw InternalError("a(pi) at " + p.get_str() + ": table gives " +
                        std::to_string(data.conductor_exponent) + ", character data give " +
                        std::to_string(gl2_conductor_from_parameters(data.kind)));
  out.sym3 = sym3_local(data, ctx);
  const int general = sym3_conductor_general(data, p);
  if (general != out.sym3->conductor_exponent)
    throw InternalError("a(sym3) at " + p.get_str() + ": table gives " +
                        std::to_string(out.sym3->conductor_exponent) +
                        ", general formula gives " + std::to_string(general));
  return out;
}

Integer closed_form_level(const Integer &conductor, const std::vector<PrimeAnalysis> &primes) {
  Integer m = conductor;
  for (const PrimeAnalysis &pa : primes) {
    if (!mpz_divisible_p(conductor.get_mpz_t(), pa.p.get_mpz_t()))
      continue;
    if (pa.v_disc % 4 != 0)
      m *= pa.p * pa.p;
  }
  return m;
}

namespace {

// Relation between i = a(pi_p) and k = a(sym3 pi_p) prime by prime:
// k = i exactly when j is in Z_p and 4 | v_p(disc), except for the wild
// potentially multiplicative case at 2 where k = 2i.
int expected_k(const PrimeAnalysis &pa, int i) {
  if (pa.p == 2 && pa.reduction == ReductionType::AdditivePotentiallyMultiplicative)
    return 2 * i;
  return pa.j_integral && pa.v_disc % 4 == 0 ? i : i + 2;
}

} // namespace

GlobalReport assemble_global(const Invariants &inv, std::vector<PrimeAnalysis> primes) {
  std::sort(primes.begin(), primes.end(),
            [](const PrimeAnalysis &a, const PrimeAnalysis &b) { return a.p < b.p; });

  GlobalReport out;
  out.cm = is_cm(inv.j);
  if (out.cm)
    out.warnings.push_back("j = " + inv.j.get_str() +
                           " is a CM j-invariant; the lift to a paramodular form assumes "
                           "a non-CM curve (local data are still valid)");

  Integer n = 1, m = 1;
  bool additive_at_2 = false;
  for (const PrimeAnalysis &pa : primes) {
    if (pa.p == 2 && !is_multiplicative(pa.reduction))
      additive_at_2 = true;
    if (!pa.supported()) {
      out.unsupported_at_2 = true;
      out.warnings.push_back(std::get<Unsupported>(pa.gl2).reason +
                             " is not classified; N and M are not determined");
      continue;
    }
    const int i = std::get<LocalGL2Data>(pa.gl2).conductor_exponent;
    const int k = pa.sym3->conductor_exponent;
    if (expected_k(pa, i) != k)
      throw InternalError("exponents i = " + std::to_string(i) + ", k = " +
                          std::to_string(k) + " at " + pa.p.get_str() +
                          " violate the per-prime level relation");
    n *= power(pa.p, static_cast<unsigned long>(i));
    m *= power(pa.p, static_cast<unsigned long>(k));
    out.atkin_lehner.emplace_back(pa.p, pa.sym3->epsilon);
  }

  if (!out.unsupported_at_2) {
    out.conductor = n;
    out.level = m;
    if (!additive_at_2) {
      out.closed_form_level = closed_form_level(n, primes);
      if (*out.closed_form_level != m)
        out.warnings.push_back("closed-form level " + out.closed_form_level->get_str() +
                               " (N times p^2 for p | N with v_p(disc) != 0 mod 4) differs "
                               "from the per-prime level M = " + m.get_str());
    }
  }
  out.primes = std::move(primes);
  return out;
}

GlobalReport analyze_minimal_curve(const Curve &minimal, const RootNumberProvider &root_number) {
  const Invariants inv = invariants(minimal);
  std::vector<PrimeAnalysis> primes;
  for (const PrimePower &pp : factorize(inv.disc))
    primes.push_back(analyze_prime(minimal, inv, pp.prime, root_number));
  return assemble_global(inv, std::move(primes));
}

bool is_cm(const Rational &j) {
  static const std::vector<Integer> kCmJ = {
      Integer(0),
      Integer(1728),
      Integer(-3375),
      Integer(8000),
      Integer(-32768),
      Integer(54000),
      Integer(287496),
      Integer(-884736),
      Integer(-12288000),
      Integer(16581375),
      Integer(-884736000),
      Integer("-147197952000"),
      Integer("-262537412640768000"),
  };
  if (j.get_den() != 1)
    return false;
  return std::find(kCmJ.begin(), kCmJ.end(), j.get_num()) != kCmJ.end();
}

} // namespace symcube
