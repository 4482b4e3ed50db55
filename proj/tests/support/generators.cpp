#include "generators.hpp"

#include <cmath>
#include <cstdio>

namespace gen {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

namespace {

using Eval = std::function<double(std::span<const double>)>;

RandomFunction leaf(Rng& rng, int arity) {
  RandomFunction f;
  f.arity = arity;
  if (arity > 0 && uniform_int(rng, 0, 2) != 0) {
    const int i = uniform_int(rng, 1, arity);
    f.text = "x" + std::to_string(i);
    f.eval = [i](std::span<const double> x) { return x[static_cast<std::size_t>(i - 1)]; };
  } else {
    const double c = std::round(uniform(rng, -1.5, 1.5) * 100.0) / 100.0;
    f.text = number(c);
    f.eval = [c](std::span<const double>) { return c; };
  }
  return f;
}

RandomFunction build(Rng& rng, int arity, int depth) {
  if (depth <= 0) return leaf(rng, arity);
  const int choice = uniform_int(rng, 0, 9);
  RandomFunction out;
  out.arity = arity;
  auto paren = [](const std::string& s) { return "(" + s + ")"; };
  switch (choice) {
    case 0:
      return leaf(rng, arity);
    case 1:
    case 2: {
      auto a = build(rng, arity, depth - 1);
      auto b = build(rng, arity, depth - 1);
      const bool plus = choice == 1;
      out.text = paren(a.text) + (plus ? "+" : "-") + paren(b.text);
      out.eval = [a = a.eval, b = b.eval, plus](std::span<const double> x) { return plus ? a(x) + b(x) : a(x) - b(x); };
      return out;
    }
    case 3: {
      auto a = build(rng, arity, depth - 1);
      auto b = build(rng, arity, depth - 1);
      out.text = paren(a.text) + "*" + paren(b.text);
      out.eval = [a = a.eval, b = b.eval](std::span<const double> x) { return a(x) * b(x); };
      return out;
    }
    case 4: {
      auto a = build(rng, arity, depth - 1);
      auto q = build(rng, arity, depth - 1);
      const double c = std::round(uniform(rng, 0.5, 2.0) * 100.0) / 100.0;
      out.text = paren(a.text) + "/(" + number(c) + "+" + paren(q.text) + "^2)";
      out.eval = [a = a.eval, q = q.eval, c](std::span<const double> x) {
        const double d = q(x);
        return a(x) / (c + d * d);
      };
      return out;
    }
    case 5: {
      auto a = build(rng, arity, depth - 1);
      const int k = uniform_int(rng, 0, 3);
      out.text = paren(a.text) + "^" + std::to_string(k);
      out.eval = [a = a.eval, k](std::span<const double> x) { return std::pow(a(x), k); };
      return out;
    }
    case 6: {
      auto a = build(rng, arity, depth - 1);
      out.text = "-" + paren(a.text);
      out.eval = [a = a.eval](std::span<const double> x) { return -a(x); };
      return out;
    }
    case 7: {
      // exp of a bounded argument keeps values moderate.
      auto a = build(rng, arity, depth - 1);
      out.text = "exp(0.5*sin(" + a.text + "))";
      out.eval = [a = a.eval](std::span<const double> x) { return std::exp(0.5 * std::sin(a(x))); };
      return out;
    }
    case 8: {
      auto a = build(rng, arity, depth - 1);
      out.text = "sin(" + a.text + ")";
      out.eval = [a = a.eval](std::span<const double> x) { return std::sin(a(x)); };
      return out;
    }
    default: {
      auto a = build(rng, arity, depth - 1);
      out.text = "cos(" + a.text + ")";
      out.eval = [a = a.eval](std::span<const double> x) { return std::cos(a(x)); };
      return out;
    }
  }
}

}  // namespace

RandomFunction random_expression(Rng& rng, int arity, int depth) { return build(rng, arity, depth); }

Perturbation random_perturbation(Rng& rng, int arity, double r, double bound) {
  struct Term {
    std::string body;
    double c2;  // bound for unit coefficient
    double c1;
  };
  std::vector<Term> terms;
  terms.push_back({"1", 1.0, 1.0});
  const int count = uniform_int(rng, 2, 5);
  for (int t = 0; t < count; ++t) {
    if (uniform_int(rng, 0, 3) == 0) {
      // sin(w*x_i): |.| <= 1, |D| <= w, |D^2| <= w^2
      const int i = uniform_int(rng, 1, arity);
      const double w = std::round(uniform(rng, 0.5, 3.0) * 100.0) / 100.0;
      terms.push_back({"sin(" + number(w) + "*x" + std::to_string(i) + ")", 1.0 + w + w * w, 1.0 + w});
      continue;
    }
    const int d = uniform_int(rng, 1, 3);
    std::string body;
    for (int j = 0; j < d; ++j) {
      if (j) body += "*";
      body += "x" + std::to_string(uniform_int(rng, 1, arity));
    }
    // Each partial of a degree-d monomial is bounded by r^(d-order) on B(r):
    // |x^a| <= r^d, |grad| <= d r^(d-1), |Hess|_F <= d(d-1) r^(d-2).
    const double value = std::pow(r, d);
    const double grad = d * std::pow(r, d - 1);
    const double hess = d >= 2 ? d * (d - 1) * std::pow(r, d - 2) : 0.0;
    terms.push_back({body, value + grad + hess, value + grad});
  }
  std::vector<double> coeff(terms.size());
  double c2 = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    coeff[t] = uniform(rng, -1.0, 1.0);
    c2 += std::abs(coeff[t]) * terms[t].c2;
  }
  const double scale = bound / c2;
  Perturbation p;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = coeff[t] * scale;
    p.c2_bound += std::abs(c) * terms[t].c2;
    p.c1_bound += std::abs(c) * terms[t].c1;
    if (!p.text.empty()) p.text += "+";
    p.text += number(c) + "*" + terms[t].body;
  }
  return p;
}

std::string model_text(const std::vector<int>& signs, double offset) {
  std::string s;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    s += signs[i] ? "-" : (i ? "+" : "");
    s += "x" + std::to_string(i + 1) + "^2";
  }
  s += "+" + number(offset);
  return s;
}

RandomFunction random_polynomial2(Rng& rng, int degree) {
  struct Term {
    double c;
    int i, j;
  };
  std::vector<Term> terms;
  std::string text;
  for (int d = 0; d <= degree; ++d)
    for (int i = d; i >= 0; --i) {
      const Term t{uniform(rng, -1, 1), i, d - i};
      terms.push_back(t);
      if (!text.empty()) text += "+";
      text += number(t.c);
      if (t.i) text += "*x1^" + std::to_string(t.i);
      if (t.j) text += "*x2^" + std::to_string(t.j);
    }
  RandomFunction f;
  f.arity = 2;
  f.text = text;
  f.eval = [terms](std::span<const double> x) {
    double s = 0;
    for (const Term& t : terms) s += t.c * std::pow(x[0], t.i) * std::pow(x[1], t.j);
    return s;
  };
  return f;
}

msl::BumpPerturbation random_bump(Rng& rng, double amplitude) {
  msl::BumpPerturbation b;
  b.center = uniform(rng, -0.3, 0.3);
  b.halfwidth = uniform(rng, 0.5, 0.7);
  for (int j = 0; j < 3; ++j) b.coefficients.push_back(amplitude * uniform(rng, -1, 1));
  return b;
}

}  // namespace gen
