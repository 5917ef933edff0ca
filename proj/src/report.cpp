#include "symcube/report.hpp"

#include "symcube/errors.hpp"
#include "symcube/factor.hpp"

#include <atomic>
#include <cctype>
#include <istream>
#include <sstream>
#include <thread>

namespace symcube {

using nlohmann::json;

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && is_space(s.back()))
    s.remove_suffix(1);
  return s;
}

class Cursor {
public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_]))
      ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return text_.substr(std::min(pos_, text_.size())); }

  void expect(char c) {
    skip_space();
    if (peek() != c)
      throw ParseError(pos_, std::string("expected '") + c + "'" + found());
    ++pos_;
  }

  Integer integer() {
    skip_space();
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-')
      ++pos_;
    const std::size_t digits = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek())))
      ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      throw ParseError(start, "expected an integer" + found());
    }
    // mpz does not accept a leading '+'.
    std::string token(text_.substr(text_[start] == '+' ? start + 1 : start,
                                   pos_ - (text_[start] == '+' ? start + 1 : start)));
    return Integer(token);
  }

  std::string found() const {
    if (at_end())
      return ", found end of input";
    return std::string(", found '") + peek() + "'";
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

json str(const Integer &n) { return n.get_str(); }
json str(const Rational &q) { return q.get_str(); }

json valuation_json(Valuation v) {
  if (v.is_infinite())
    return v.to_string();
  return v.value();
}

json gl2_json(const LocalGL2Data &d) {
  json out = std::visit(
      overloaded{
          [](const UnramifiedGood &) { return json::object(); },
          [](const TwistedSteinberg &st) {
            return json{{"character", to_string(st.character.kind)},
                        {"character_conductor", st.character.conductor_exponent}};
          },
          [](const PrincipalSeries &ps) {
            return json{{"a_chi", ps.a_chi}, {"chi_unit_order", ps.chi_unit_order}};
          },
          [](const DihedralSupercuspidal &sc) {
            json j{{"field", sc.field_ramified ? "ramified" : "unramified"},
                   {"a_xi", sc.a_xi},
                   {"xi_unit_order", sc.xi_unit_order}};
            switch (sc.xi_at_uniformizer) {
            case UniformizerValue::Plus:
              j["xi_at_uniformizer"] = 1;
              break;
            case UniformizerValue::Minus:
              j["xi_at_uniformizer"] = -1;
              break;
            case UniformizerValue::Unknown:
              j["xi_at_uniformizer"] = nullptr;
              break;
            }
            return j;
          },
      },
      d.kind);
  out["kind"] = kind_name(d.kind);
  out["a"] = d.conductor_exponent;
  return out;
}

std::string sign_kind(SignExpr::Kind k) {
  switch (k) {
  case SignExpr::Kind::Plus:
    return "plus";
  case SignExpr::Kind::Minus:
    return "minus";
  case SignExpr::Kind::LegendreDeltaTimesRoot:
    return "legendre-times-root";
  case SignExpr::Kind::MinusRoot:
    return "minus-root";
  }
  return "?";
}

std::string l_kind(LFactor::Kind k) {
  switch (k) {
  case LFactor::Kind::One:
    return "one";
  case LFactor::Kind::SplitSt:
    return "split-steinberg";
  case LFactor::Kind::NonsplitSt:
    return "nonsplit-steinberg";
  case LFactor::Kind::AlphaI:
    return "alpha-i";
  case LFactor::Kind::UnitaryUndetermined:
    return "unitary-undetermined";
  case LFactor::Kind::Unramified:
    return "unramified";
  }
  return "?";
}

json sign_json(const SignExpr &s) {
  json j{{"kind", sign_kind(s.kind)}, {"expr", s.render()}};
  j["value"] = s.value() ? json(*s.value()) : json(nullptr);
  if (s.kind == SignExpr::Kind::LegendreDeltaTimesRoot)
    j["legendre_delta"] = s.legendre_delta;
  return j;
}

json prime_json(const PrimeAnalysis &pa, const Invariants &inv) {
  json j{{"p", str(pa.p)},
         {"v_disc", pa.v_disc},
         {"v_c4", valuation_json(valuation(inv.c4, pa.p))},
         {"v_c6", valuation_json(valuation(inv.c6, pa.p))},
         {"reduction", to_string(pa.reduction)},
         {"j_integral", pa.j_integral}};
  if (const auto *d = std::get_if<LocalGL2Data>(&pa.gl2))
    j["gl2"] = gl2_json(*d);
  else
    j["unsupported"] = std::get<Unsupported>(pa.gl2).reason;
  if (pa.q3_condition) {
    j["q3_condition"] = to_string(*pa.q3_condition);
    j["neron_type"] = pa.neron_type;
    j["legendre_delta"] = *pa.legendre_delta;
  }
  if (pa.e)
    j["e"] = *pa.e;
  if (pa.sym3) {
    const Sym3LocalData &s = *pa.sym3;
    j["sym3"] = json{{"k", s.conductor_exponent},
                     {"rep_type", to_string(s.rep_type)},
                     {"epsilon", sign_json(s.epsilon)},
                     {"l_factor", json{{"kind", l_kind(s.l_factor.kind)},
                                       {"expr", s.l_factor.render()}}}};
  }
  return j;
}

json curve_json(const Curve &c) {
  return json::array({str(c.a1), str(c.a2), str(c.a3), str(c.a4), str(c.a6)});
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    s = s.substr(1, s.size() - 2);
  return s;
}

bool is_csv_header(std::string_view line) {
  line = trim(line);
  if (line.size() < 6)
    return false;
  std::string head(line.substr(0, 6));
  for (char &c : head)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return head == "label,";
}

} // namespace

// ---------------------------------------------------------------------------

CurveSpec parse_curve(std::string_view text) {
  Cursor cur(text);
  cur.expect('[');
  Integer a[5];
  for (int i = 0; i < 5; ++i) {
    a[i] = cur.integer();
    cur.skip_space();
    if (i < 4) {
      if (cur.peek() == ']')
        throw ParseError(cur.pos(), "expected 5 coefficients, found " + std::to_string(i + 1));
      cur.expect(',');
    } else {
      if (cur.peek() == ',')
        throw ParseError(cur.pos(), "expected ']' after 5 coefficients, found ','");
      cur.expect(']');
    }
  }
  return {{a[0], a[1], a[2], a[3], a[4]}, std::string(trim(cur.rest()))};
}

CurveSpec parse_csv_row(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      fields.emplace_back(start, text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (fields.size() != 6)
    throw ParseError(text.size(), "expected 6 CSV fields (label,a1,a2,a3,a4,a6), found " +
                                      std::to_string(fields.size()));
  Integer a[5];
  for (int i = 0; i < 5; ++i) {
    const auto &[offset, field] = fields[i + 1];
    Cursor cur(field);
    a[i] = cur.integer();
    cur.skip_space();
    if (!cur.at_end())
      throw ParseError(offset + cur.pos(), "unexpected text after integer" + cur.found());
  }
  return {{a[0], a[1], a[2], a[3], a[4]}, std::string(unquote(fields[0].second))};
}

std::string to_string(Status s) {
  switch (s) {
  case Status::Ok:
    return "ok";
  case Status::RefusedUnsupported2:
    return "refused-unsupported-2";
  case Status::RefusedSingular:
    return "refused-singular";
  case Status::RefusedNonminimal:
    return "refused-nonminimal";
  case Status::InvalidInput:
    return "invalid-input";
  case Status::Error:
    return "error";
  }
  return "?";
}

std::string to_string(MinimalityMode m) {
  switch (m) {
  case MinimalityMode::Verify:
    return "verify";
  case MinimalityMode::Minimize:
    return "minimize";
  case MinimalityMode::AssumeMinimal:
    return "assume-minimal";
  }
  return "?";
}

int exit_code(Status s) {
  switch (s) {
  case Status::Ok:
    return 0;
  case Status::RefusedUnsupported2:
  case Status::RefusedSingular:
  case Status::RefusedNonminimal:
    return 2;
  case Status::InvalidInput:
  case Status::Error:
    return 1;
  }
  return 1;
}

std::vector<Integer> nonminimal_primes(const Curve &curve) {
  const Integer disc = discriminant(curve);
  if (disc == 0)
    throw SingularCurve();
  std::vector<Integer> out;
  for (const PrimePower &pp : factorize(disc))
    if (pp.exponent >= 12 && !is_minimal_at(curve, pp.prime))
      out.push_back(pp.prime);
  return out;
}

ReportEnvelope analyze(const CurveSpec &spec, const Options &options) {
  ReportEnvelope env;
  env.input = spec.curve.to_string();
  env.spec = spec;
  env.minimality = options.minimality;

  try {
    if (discriminant(spec.curve) == 0) {
      env.status = Status::RefusedSingular;
      env.message = SingularCurve().what();
      return env;
    }

    Curve model = spec.curve;
    switch (options.minimality) {
    case MinimalityMode::Verify:
      env.nonminimal_primes = nonminimal_primes(model);
      env.input_minimal = env.nonminimal_primes.empty();
      if (!*env.input_minimal) {
        env.status = Status::RefusedNonminimal;
        std::string ps;
        for (const Integer &p : env.nonminimal_primes)
          ps += (ps.empty() ? "" : ", ") + p.get_str();
        env.message = "model is not minimal at " + ps + " (use --minimize)";
        return env;
      }
      break;
    case MinimalityMode::Minimize: {
      env.nonminimal_primes = nonminimal_primes(model);
      env.input_minimal = env.nonminimal_primes.empty();
      const Minimization m = minimize(model);
      model = m.curve;
      env.applied = m.applied;
      break;
    }
    case MinimalityMode::AssumeMinimal:
      break;
    }

    env.model = model;
    env.invariants = invariants(model);
    env.report = analyze_minimal_curve(model, options.root_number);
    if (env.report->unsupported_at_2) {
      env.status = Status::RefusedUnsupported2;
      env.message = "additive, potentially good reduction at 2 is not supported";
    } else {
      env.status = Status::Ok;
    }
  } catch (const InputError &e) {
    env.status = Status::InvalidInput;
    env.message = e.what();
  } catch (const Error &e) {
    env.status = Status::Error;
    env.message = e.what();
  }
  return env;
}

ReportEnvelope analyze_text(std::string_view text, const Options &options) {
  try {
    ReportEnvelope env = analyze(parse_curve(text), options);
    env.input = std::string(trim(text));
    return env;
  } catch (const ParseError &e) {
    ReportEnvelope env;
    env.input = std::string(trim(text));
    env.status = Status::InvalidInput;
    env.message = e.what();
    env.minimality = options.minimality;
    return env;
  }
}

json to_json(const ReportEnvelope &env) {
  json j{{"input", env.input}, {"status", to_string(env.status)}};
  if (!env.message.empty())
    j["message"] = env.message;
  if (env.spec) {
    j["curve"] = curve_json(env.spec->curve);
    if (!env.spec->label.empty())
      j["label"] = env.spec->label;
  }
  if (!env.spec || env.status == Status::RefusedSingular)
    return j;

  json minimality{{"mode", to_string(env.minimality)}};
  minimality["input_minimal"] = env.input_minimal ? json(*env.input_minimal) : json(nullptr);
  minimality["nonminimal_primes"] = json::array();
  for (const Integer &p : env.nonminimal_primes)
    minimality["nonminimal_primes"].push_back(str(p));
  if (!env.applied.is_identity())
    minimality["transformation"] = json{{"u", str(env.applied.u)},
                                        {"r", str(env.applied.r)},
                                        {"s", str(env.applied.s)},
                                        {"t", str(env.applied.t)}};
  j["minimality"] = minimality;

  if (env.model && env.invariants) {
    const Invariants &inv = *env.invariants;
    j["model"] = json{{"coefficients", curve_json(*env.model)},
                      {"disc", str(inv.disc)},
                      {"c4", str(inv.c4)},
                      {"c6", str(inv.c6)},
                      {"j", str(inv.j)}};
  }
  if (!env.report)
    return j;

  const GlobalReport &r = *env.report;
  json g;
  g["conductor_N"] = r.conductor ? str(*r.conductor) : json(nullptr);
  g["level_M"] = r.level ? str(*r.level) : json(nullptr);
  g["closed_form_level"] = r.closed_form_level ? str(*r.closed_form_level) : json(nullptr);
  g["primes"] = json::array();
  for (const PrimeAnalysis &pa : r.primes)
    g["primes"].push_back(prime_json(pa, *env.invariants));
  g["atkin_lehner"] = json::array();
  for (const auto &[p, sign] : r.atkin_lehner)
    g["atkin_lehner"].push_back(json{{"p", str(p)}, {"sign", sign_json(sign)}});
  g["gamma_factors"] = r.gamma_factors;
  g["cm"] = r.cm;
  g["warnings"] = r.warnings;
  j["report"] = g;
  return j;
}

std::string to_text(const ReportEnvelope &env) {
  std::ostringstream out;
  out << env.input;
  if (env.spec && !env.spec->label.empty() && env.input.find(env.spec->label) == std::string::npos)
    out << "  (" << env.spec->label << ")";
  out << "\n  status: " << to_string(env.status) << "\n";
  if (!env.message.empty())
    out << "  message: " << env.message << "\n";
  if (!env.applied.is_identity())
    out << "  minimal model: " << env.model->to_string() << "  via [u,r,s,t] = ["
        << env.applied.u.get_str() << "," << env.applied.r.get_str() << ","
        << env.applied.s.get_str() << "," << env.applied.t.get_str() << "]\n";
  if (env.invariants)
    out << "  disc = " << env.invariants->disc << ", c4 = " << env.invariants->c4
        << ", c6 = " << env.invariants->c6 << ", j = " << env.invariants->j << "\n";
  if (!env.report)
    return out.str();

  const GlobalReport &r = *env.report;
  if (r.conductor)
    out << "  N = " << *r.conductor << "\n  M = " << *r.level << "\n";
  for (const PrimeAnalysis &pa : r.primes) {
    out << "  p = " << pa.p << ": v(disc) = " << pa.v_disc << ", " << to_string(pa.reduction);
    if (pa.q3_condition)
      out << ", " << to_string(*pa.q3_condition) << " (" << pa.neron_type << ")";
    if (pa.e)
      out << ", e = " << *pa.e;
    if (const auto *d = std::get_if<LocalGL2Data>(&pa.gl2))
      out << ", " << kind_name(d->kind) << " a(pi) = " << d->conductor_exponent;
    else
      out << ", unsupported: " << std::get<Unsupported>(pa.gl2).reason;
    out << "\n";
    if (pa.sym3)
      out << "      sym3: k = " << pa.sym3->conductor_exponent
          << ", type " << to_string(pa.sym3->rep_type)
          << ", eps = " << pa.sym3->epsilon.render()
          << ", L = " << pa.sym3->l_factor.render() << "\n";
  }
  out << "  gamma factors: " << r.gamma_factors << "\n";
  for (const std::string &w : r.warnings)
    out << "  warning: " << w << "\n";
  return out.str();
}

std::vector<ReportEnvelope> batch(std::istream &in, const Options &options, unsigned jobs) {
  struct Item {
    std::string text;
    bool csv;
  };
  std::vector<Item> items;
  std::string line;
  bool first = true, csv = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    if (first && is_csv_header(t)) {
      csv = true;
      first = false;
      continue;
    }
    first = false;
    items.push_back({std::string(t), csv});
  }

  std::vector<ReportEnvelope> out(items.size());
  auto run = [&](std::size_t i) {
    const Item &item = items[i];
    if (!item.csv) {
      out[i] = analyze_text(item.text, options);
      return;
    }
    try {
      out[i] = analyze(parse_csv_row(item.text), options);
      out[i].input = item.text;
    } catch (const ParseError &e) {
      out[i].input = item.text;
      out[i].status = Status::InvalidInput;
      out[i].message = e.what();
      out[i].minimality = options.minimality;
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(items.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i)
      run(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < items.size(); i = next++)
        run(i);
    });
  for (std::thread &t : pool)
    t.join();
  return out;
}

std::map<Status, std::size_t> count_statuses(const std::vector<ReportEnvelope> &envs) {
  std::map<Status, std::size_t> counts;
  for (Status s : kAllStatuses)
    counts[s] = 0;
  for (const ReportEnvelope &e : envs)
    ++counts[e.status];
  return counts;
}

json summary_json(const std::vector<ReportEnvelope> &envs) {
  json counts = json::object();
  for (const auto &[s, n] : count_statuses(envs))
    counts[to_string(s)] = n;
  return json{{"summary", json{{"total", envs.size()}, {"counts", counts}}}};
}

std::string summary_text(const std::vector<ReportEnvelope> &envs) {
  std::string out = "summary: total " + std::to_string(envs.size());
  for (const auto &[s, n] : count_statuses(envs))
    out += ", " + to_string(s) + " " + std::to_string(n);
  return out;
}

} // namespace symcube
