#include "symcube/local.hpp"

#include "symcube/errors.hpp"

#include <array>
#include <numeric>

namespace symcube {

namespace {

const Integer kTwo = 2;
const Integer kThree = 3;

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

} // namespace

std::string to_string(ReductionType r) {
  switch (r) {
  case ReductionType::Good:
    return "good";
  case ReductionType::SplitMultiplicative:
    return "split-multiplicative";
  case ReductionType::NonsplitMultiplicative:
    return "nonsplit-multiplicative";
  case ReductionType::AdditivePotentiallyMultiplicative:
    return "additive-potentially-multiplicative";
  case ReductionType::AdditivePotentiallyGood:
    return "additive-potentially-good";
  }
  return "?";
}

std::string to_string(Q3Condition c) {
  switch (c) {
  case Q3Condition::P2:
    return "P2";
  case Q3Condition::P3:
    return "P3";
  case Q3Condition::P4:
    return "P4";
  case Q3Condition::P6:
    return "P6";
  case Q3Condition::S3:
    return "S3";
  case Q3Condition::S4:
    return "S4";
  case Q3Condition::S6:
    return "S6";
  case Q3Condition::S6prime:
    return "S6'";
  case Q3Condition::S6doubleprime:
    return "S6''";
  }
  return "?";
}

int gl2_conductor_from_parameters(const GL2Kind &kind) {
  return std::visit(
      overloaded{
          [](const UnramifiedGood &) { return 0; },
          [](const TwistedSteinberg &st) {
            return st.character.is_unramified() ? 1
                                                : 2 * st.character.conductor_exponent;
          },
          [](const PrincipalSeries &ps) { return 2 * ps.a_chi; },
          [](const DihedralSupercuspidal &sc) {
            return sc.field_ramified ? 1 + sc.a_xi : 2 * sc.a_xi;
          },
      },
      kind);
}

std::string kind_name(const GL2Kind &kind) {
  return std::visit(overloaded{
                        [](const UnramifiedGood &) { return std::string("unramified"); },
                        [](const TwistedSteinberg &) {
                          return std::string("twisted-steinberg");
                        },
                        [](const PrincipalSeries &) {
                          return std::string("principal-series");
                        },
                        [](const DihedralSupercuspidal &) {
                          return std::string("dihedral-supercuspidal");
                        },
                    },
                    kind);
}

bool is_potentially_multiplicative(const Invariants &inv, const Integer &p) {
  const Valuation vc4 = valuation(inv.c4, p);
  const Valuation vd = valuation(inv.disc, p);
  return !vc4.is_infinite() && 3 * vc4.value() < vd;
}

Rational gamma_invariant(const Invariants &inv) {
  if (inv.c6 == 0)
    throw UndefinedGamma();
  Rational g(-inv.c4, inv.c6);
  g.canonicalize();
  return g;
}

ReductionType reduction_type_assuming_minimal(const Invariants &inv, const Integer &p) {
  const Valuation vd = valuation(inv.disc, p);
  if (vd == 0)
    return ReductionType::Good;
  const Valuation vc4 = valuation(inv.c4, p);
  if (vc4 == 0) {
    switch (quad_char_class(gamma_invariant(inv), p).kind) {
    case CharKind::Trivial:
      return ReductionType::SplitMultiplicative;
    case CharKind::UnramifiedNontrivial:
      return ReductionType::NonsplitMultiplicative;
    case CharKind::Ramified:
      throw InternalError("ramified gamma character at a multiplicative prime " +
                          p.get_str());
    }
  }
  return is_potentially_multiplicative(inv, p)
             ? ReductionType::AdditivePotentiallyMultiplicative
             : ReductionType::AdditivePotentiallyGood;
}

ReductionType reduction_type(const Invariants &inv, const Curve &curve, const Integer &p) {
  if (!is_minimal_at(curve, p))
    throw PreconditionError("model is not minimal at " + p.get_str());
  return reduction_type_assuming_minimal(inv, p);
}

LocalGL2Data classify_pot_mult(const Invariants &inv, const Integer &p) {
  if (!is_potentially_multiplicative(inv, p))
    throw PreconditionError("j is integral at " + p.get_str());
  const QuadCharClass chi = quad_char_class(gamma_invariant(inv), p);

  // Conductor column of the potentially multiplicative table.
  int a;
  if (chi.is_unramified())
    a = 1;
  else if (p != 2)
    a = 2;
  else
    a = chi.conductor_exponent == 2 ? 4 : 6;
  return {TwistedSteinberg{chi}, a};
}

LargePrimeClassification classify_pot_good_large_p(const Invariants &inv,
                                                   const Integer &p) {
  if (p < 5)
    throw PreconditionError("residue characteristic must be at least 5");
  const Valuation vd = valuation(inv.disc, p);
  const Valuation vc4 = valuation(inv.c4, p);
  if (vd <= 0 || vc4 <= 0 || is_potentially_multiplicative(inv, p))
    throw PreconditionError("not additive potentially good at " + p.get_str());

  const long v = vd.value();
  const int e = static_cast<int>(12 / std::gcd(v, 12L));
  const Integer branch = (p - 1) * v;
  if (mpz_divisible_ui_p(branch.get_mpz_t(), 12)) {
    if (!mpz_divisible_ui_p(Integer(p - 1).get_mpz_t(), static_cast<unsigned long>(e)))
      throw InternalError("principal series with e not dividing p - 1");
    return {{PrincipalSeries{1, e}, 2}, e};
  }
  return {{DihedralSupercuspidal{false, 1, e, UniformizerValue::Minus}, 2}, e};
}

// ---------------------------------------------------------------------------

namespace {

using VB = ValuationBound;
constexpr VB eq(long n) { return {n, false}; }
constexpr VB ge(long n) { return {n, true}; }

constexpr auto N = AuxCongruence::None;
constexpr auto H = AuxCongruence::Holds;
constexpr auto F = AuxCongruence::Fails;

using C = Q3Condition;
using R = Reducibility;

constexpr std::array<Q3Row, 28> kQ3Rows{{
    {C::P2, R::None, 6, eq(2), eq(3), N, "I0*", 2},
    {C::P2, R::None, 6, eq(3), ge(6), N, "I0*", 2},

    {C::P4, R::MinusOneSquare, 3, ge(2), eq(3), H, "III", 2},
    {C::P4, R::MinusOneSquare, 3, eq(2), ge(5), N, "III", 2},
    {C::P4, R::MinusOneSquare, 9, ge(4), eq(6), H, "III*", 2},
    {C::P4, R::MinusOneSquare, 9, eq(4), ge(8), N, "III*", 2},

    {C::S4, R::MinusOneNonsquare, 3, ge(2), eq(3), H, "III", 2},
    {C::S4, R::MinusOneNonsquare, 3, eq(2), ge(5), N, "III", 2},
    {C::S4, R::MinusOneNonsquare, 9, ge(4), eq(6), H, "III*", 2},
    {C::S4, R::MinusOneNonsquare, 9, eq(4), ge(8), N, "III*", 2},

    {C::P3, R::DiscSquare, 4, eq(2), eq(3), N, "II", 4},
    {C::P3, R::DiscSquare, 12, eq(5), eq(8), N, "II*", 4},

    {C::S3, R::DiscNonsquare, 4, eq(2), eq(3), N, "II", 4},
    {C::S3, R::DiscNonsquare, 12, eq(5), eq(8), N, "II*", 4},

    {C::P6, R::DiscSquare, 6, eq(3), eq(5), N, "IV", 4},
    {C::P6, R::DiscSquare, 10, eq(4), eq(6), N, "IV*", 4},

    {C::S6, R::DiscNonsquare, 6, eq(3), eq(5), N, "IV", 4},
    {C::S6, R::DiscNonsquare, 10, eq(4), eq(6), N, "IV*", 4},

    {C::S6prime, R::DiscNonsquare, 3, ge(2), eq(3), F, "II", 3},
    {C::S6prime, R::DiscNonsquare, 3, eq(2), eq(4), N, "II", 3},
    {C::S6prime, R::DiscNonsquare, 5, eq(2), eq(3), N, "IV", 3},
    {C::S6prime, R::DiscNonsquare, 9, ge(4), eq(6), F, "IV*", 3},
    {C::S6prime, R::DiscNonsquare, 9, eq(4), eq(7), N, "IV*", 3},
    {C::S6prime, R::DiscNonsquare, 11, eq(4), eq(6), N, "II*", 3},

    {C::S6doubleprime, R::DiscNonsquare, 5, ge(3), eq(4), N, "II", 5},
    {C::S6doubleprime, R::DiscNonsquare, 7, ge(4), eq(5), N, "IV", 5},
    {C::S6doubleprime, R::DiscNonsquare, 11, ge(5), eq(7), N, "IV*", 5},
    {C::S6doubleprime, R::DiscNonsquare, 13, ge(6), eq(8), N, "II*", 5},
}};

// (c6/3^k)^2 + 2 = c4/3^m (mod 9), with (k, m) = (3, 1) for v(disc) = 3 and
// (6, 3) for v(disc) = 9. The row guards make both divisions exact.
bool aux_congruence_holds(const Invariants &inv, long v_disc) {
  const unsigned long k = v_disc == 3 ? 3 : 6;
  const unsigned long m = v_disc == 3 ? 1 : 3;
  Integer c6k, c4m, pk, pm;
  mpz_ui_pow_ui(pk.get_mpz_t(), 3, k);
  mpz_ui_pow_ui(pm.get_mpz_t(), 3, m);
  if (!mpz_divisible_p(inv.c6.get_mpz_t(), pk.get_mpz_t()) ||
      !mpz_divisible_p(inv.c4.get_mpz_t(), pm.get_mpz_t()))
    throw InternalError("auxiliary congruence evaluated on an inexact quotient");
  c6k = inv.c6 / pk;
  c4m = inv.c4 / pm;
  Integer diff = c6k * c6k + 2 - c4m;
  return mpz_divisible_ui_p(diff.get_mpz_t(), 9) != 0;
}

bool reducibility_holds(Reducibility r, const Invariants &inv) {
  switch (r) {
  case Reducibility::None:
    return true;
  case Reducibility::MinusOneSquare:
    return legendre(-1, kThree) == 1;
  case Reducibility::MinusOneNonsquare:
    return legendre(-1, kThree) == -1;
  case Reducibility::DiscSquare:
    return is_square_in_qp(Rational(inv.disc), kThree);
  case Reducibility::DiscNonsquare:
    return !is_square_in_qp(Rational(inv.disc), kThree);
  }
  return false;
}

LocalGL2Data q3_representation(Q3Condition c, int v_conductor) {
  auto sc = [](bool ramified, int a_xi, int order) {
    return DihedralSupercuspidal{ramified, a_xi, order,
                                 ramified ? UniformizerValue::Unknown
                                          : UniformizerValue::Minus};
  };
  switch (c) {
  case C::P2:
    return {PrincipalSeries{1, 2}, v_conductor};
  case C::P3:
    return {PrincipalSeries{2, 3}, v_conductor};
  case C::P6:
    return {PrincipalSeries{2, 6}, v_conductor};
  case C::S4:
    return {sc(false, 1, 4), v_conductor};
  case C::S3:
    return {sc(false, 2, 3), v_conductor};
  case C::S6:
    return {sc(false, 2, 6), v_conductor};
  case C::S6prime:
    return {sc(true, 2, 6), v_conductor};
  case C::S6doubleprime:
    return {sc(true, 4, 6), v_conductor};
  case C::P4:
    break;
  }
  throw ClassificationError("condition P4 cannot occur over Q_3");
}

} // namespace

std::span<const Q3Row> q3_table() { return kQ3Rows; }

std::vector<const Q3Row *> q3_matching_rows(const Invariants &inv,
                                           bool check_reducibility) {
  const Valuation vd = valuation(inv.disc, kThree);
  const Valuation vc4 = valuation(inv.c4, kThree);
  const Valuation vc6 = valuation(inv.c6, kThree);

  std::vector<const Q3Row *> hits;
  for (const Q3Row &row : q3_table()) {
    if (vd != row.v_disc || !row.v_c4.matches(vc4) || !row.v_c6.matches(vc6))
      continue;
    if (row.congruence != AuxCongruence::None &&
        aux_congruence_holds(inv, row.v_disc) != (row.congruence == AuxCongruence::Holds))
      continue;
    if (check_reducibility && !reducibility_holds(row.reducibility, inv))
      continue;
    hits.push_back(&row);
  }
  return hits;
}

Q3Classification classify_q3(const Invariants &inv) {
  const Valuation vd = valuation(inv.disc, kThree);
  const Valuation vc4 = valuation(inv.c4, kThree);
  if (vd <= 0 || vc4 <= 0 || is_potentially_multiplicative(inv, kThree))
    throw PreconditionError("not additive potentially good at 3");

  const auto hits = q3_matching_rows(inv);
  if (hits.empty())
    throw ClassificationError("no residue-characteristic-3 condition matches "
                              "(v(disc)=" + vd.to_string() + ", v(c4)=" +
                              vc4.to_string() + ", v(c6)=" +
                              valuation(inv.c6, kThree).to_string() + ")");
  if (hits.size() > 1)
    throw ClassificationError("more than one residue-characteristic-3 condition matches");
  const Q3Row *row = hits.front();
  if (row->condition == Q3Condition::P4)
    throw ClassificationError("condition P4 cannot occur over Q_3");
  return {row->condition, q3_representation(row->condition, row->v_conductor), row};
}

// ---------------------------------------------------------------------------

P2Classification classify_p2(const Invariants &inv, const Curve &curve) {
  switch (reduction_type(inv, curve, kTwo)) {
  case ReductionType::Good:
    return LocalGL2Data{UnramifiedGood{}, 0};
  case ReductionType::SplitMultiplicative:
  case ReductionType::NonsplitMultiplicative:
  case ReductionType::AdditivePotentiallyMultiplicative:
    return classify_pot_mult(inv, kTwo);
  case ReductionType::AdditivePotentiallyGood:
    break;
  }
  return Unsupported{"additive, potentially good reduction at 2"};
}

RootNumberProvider constant_root_number(int w) {
  if (w != 1 && w != -1)
    throw InputError("root number must be +1 or -1");
  return [w](const Curve &) -> std::optional<int> { return w; };
}

std::optional<int> local_root_number_3(const Curve &curve,
                                       const RootNumberProvider &provider) {
  if (!provider)
    return std::nullopt;
  const std::optional<int> w = provider(curve);
  if (w && *w != 1 && *w != -1)
    throw InputError("root number must be +1 or -1");
  return w;
}

} // namespace symcube
