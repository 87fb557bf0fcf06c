#include "dualdec/oracles.h"

#include <cmath>
#include <string>

#include "dualdec/errors.h"

namespace dualdec {

namespace {

[[noreturn]] void Unbounded(const std::string& what) {
  throw OracleFailure(-1, "local subproblem unbounded below: " + what);
}

double HingeValue(double slope, double knee, double offset, double x) {
  return std::max(-slope * (x - knee) + offset, offset);
}

// Minimizer of rho x^2 + c x on the box, rho >= 0.
ScalarResult SolveLinearOrQuadraticTail(Interval box, double c, double rho) {
  ScalarResult r;
  if (rho > 0) {
    r.x = box.Clamp(-c / (2 * rho));
  } else if (c > 0) {
    if (box.lo == -kInf) Unbounded("positive linear term, no lower bound");
    r.x = box.lo;
  } else if (c < 0) {
    if (box.hi == kInf) Unbounded("negative linear term, no upper bound");
    r.x = box.hi;
  } else {
    r.x = box.Clamp(0.0);
    r.tie_broken = box.lo < box.hi;
  }
  r.value = rho * r.x * r.x + c * r.x;
  return r;
}

}  // namespace

ScalarResult SolveQuadratic(double weight, double center, Interval box,
                            double c, double rho) {
  Require(weight + 2 * rho > 0, "quadratic oracle needs weight + 2 rho > 0");
  ScalarResult r;
  r.x = box.Clamp((weight * center - c) / (weight + 2 * rho));
  const double d = r.x - center;
  r.value = 0.5 * weight * d * d + rho * r.x * r.x + c * r.x;
  return r;
}

ScalarResult SolveHinge(double slope, double knee, double offset, Interval box,
                        double c, double rho) {
  Require(slope > 0, "hinge slope must be positive");
  ScalarResult r;
  if (rho > 0) {
    // Each linear piece plus rho x^2 + c x is a strictly convex quadratic;
    // minimize both on their sub-intervals and keep the better one.
    bool have = false;
    auto consider = [&](double x) {
      const double v =
          HingeValue(slope, knee, offset, x) + rho * x * x + c * x;
      if (!have || v < r.value) {
        r.x = x;
        r.value = v;
        have = true;
      }
    };
    if (box.lo <= knee) {
      const Interval left{box.lo, std::min(knee, box.hi)};
      consider(left.Clamp((slope - c) / (2 * rho)));
    }
    if (box.hi >= knee) {
      const Interval right{std::max(knee, box.lo), box.hi};
      consider(right.Clamp(-c / (2 * rho)));
    }
    return r;
  }

  // rho == 0: slope c - slope left of the knee, c right of it.
  const double left_slope = c - slope;
  if (c < 0) {
    if (box.hi == kInf) Unbounded("hinge with negative right slope");
    r.x = box.hi;
  } else if (left_slope > 0) {
    if (box.lo == -kInf) Unbounded("hinge with positive left slope");
    r.x = box.lo;
  } else {
    r.x = box.Clamp(knee);
    // Flat piece on one side of the knee: the minimizer set is an interval.
    if (c == 0) {
      r.tie_broken = std::max(knee, box.lo) < box.hi;
    } else if (left_slope == 0) {
      r.tie_broken = box.lo < std::min(knee, box.hi);
    }
  }
  r.value = HingeValue(slope, knee, offset, r.x) + c * r.x;
  return r;
}

ScalarResult SolveEntropy(double scale, Interval box, double c, double rho) {
  Require(scale > 0, "entropy scale must be positive");
  if (!(box.lo > 0)) {
    Fail(ErrorKind::kInvalidArgument,
         "entropy coordinate needs a positive lower bound");
  }
  // Stationary point of x log(scale x) + c x: log(scale x) + 1 + c = 0.
  const double log_x = -(1 + c) - std::log(scale);
  double x_hat = log_x > std::log(box.hi) ? box.hi : std::exp(log_x);
  if (rho > 0) {
    // The quadratic term only moves the minimizer left of x_hat.
    const EntropyAtom atom{0, scale};
    const CostAtom atoms[] = {atom};
    const Interval bracket{box.lo, box.Clamp(x_hat)};
    ScalarResult r = SolveScalarFallback(atoms, rho, bracket, c);
    return r;
  }
  ScalarResult r;
  r.x = box.Clamp(x_hat);
  if (!std::isfinite(r.x)) Unbounded("entropy stationary point overflow");
  r.value = r.x * std::log(scale * r.x) + c * r.x;
  return r;
}

namespace {

struct AtomSum {
  std::span<const CostAtom> atoms;
  double rho;
  double c;

  double Value(double x) const {
    double v = rho * x * x + c * x;
    for (const CostAtom& a : atoms) v += AtomValue(a, x);
    return v;
  }
  double RightDerivative(double x) const {
    double d = 2 * rho * x + c;
    for (const CostAtom& a : atoms) d += AtomRightDerivative(a, x);
    return d;
  }
  double LeftDerivative(double x) const {
    double d = 2 * rho * x + c;
    for (const CostAtom& a : atoms) d += AtomLeftDerivative(a, x);
    return d;
  }
  bool StrictlyConvex() const {
    if (rho > 0) return true;
    for (const CostAtom& a : atoms) {
      if (std::holds_alternative<QuadraticAtom>(a) ||
          std::holds_alternative<EntropyAtom>(a)) {
        return true;
      }
    }
    return false;
  }
};

constexpr int kMaxBisection = 200;
constexpr double kBisectionTol = 1e-12;
constexpr double kBracketLimit = 0x1.0p60;

}  // namespace

ScalarResult SolveScalarFallback(std::span<const CostAtom> atoms, double rho,
                                 Interval box, double c) {
  const AtomSum f{atoms, rho, c};
  double lo = box.lo;
  double hi = box.hi;

  // Replace infinite bounds by finite points on the correct side of the
  // minimizer.
  if (lo == -kInf) {
    double probe = std::min(-1.0, hi);
    while (f.RightDerivative(probe) > 0) {
      probe *= 2;
      if (probe < -kBracketLimit) Unbounded("no lower bracket");
    }
    lo = probe;
  }
  if (hi == kInf) {
    double probe = std::max(1.0, lo);
    while (f.LeftDerivative(probe) < 0) {
      probe = probe * 2 + 1;
      if (probe > kBracketLimit) Unbounded("no upper bracket");
    }
    hi = probe;
  }

  ScalarResult r;
  if (f.RightDerivative(lo) >= 0) {
    r.x = lo;
  } else if (f.LeftDerivative(hi) <= 0) {
    r.x = hi;
  } else {
    // Invariant: f'_+(lo) < 0 <= f'_+(hi); the minimizer lies in (lo, hi].
    int it = 0;
    for (; it < kMaxBisection && hi - lo > kBisectionTol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (f.RightDerivative(mid) < 0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (it == kMaxBisection && hi - lo > kBisectionTol) {
      throw OracleFailure(-1, "scalar bisection did not reach tolerance");
    }
    r.x = hi;
    double best = f.Value(hi);
    auto consider = [&](double x) {
      const double v = f.Value(x);
      if (v < best) {
        best = v;
        r.x = x;
      }
    };
    consider(lo);
    for (const CostAtom& a : atoms) {
      const double k = AtomKink(a);
      if (k >= lo && k <= hi) consider(k);
    }
  }
  r.value = f.Value(r.x);
  if (!f.StrictlyConvex()) {
    r.tie_broken = f.RightDerivative(r.x) == 0 || f.LeftDerivative(r.x) == 0;
  }
  return r;
}

CoordinateOracle::CoordinateOracle(std::vector<CostAtom> atoms, double rho,
                                   Interval box)
    : atoms_(std::move(atoms)), rho_(rho), box_(box) {
  int quadratics = 0, hinges = 0, entropies = 0;
  double w_sum = 0, wa_sum = 0;
  for (const CostAtom& a : atoms_) {
    if (const auto* q = std::get_if<QuadraticAtom>(&a)) {
      ++quadratics;
      w_sum += q->weight;
      wa_sum += q->weight * q->center;
    } else if (const auto* h = std::get_if<HingeAtom>(&a)) {
      ++hinges;
      p0_ = h->slope;
      p1_ = h->knee;
      p2_ = h->offset;
    } else if (const auto* e = std::get_if<EntropyAtom>(&a)) {
      ++entropies;
      p0_ = e->scale;
    } else {
      linear_ += std::get<LinearAtom>(a).coef;
    }
  }
  if (quadratics + hinges + entropies == 0) {
    kind_ = Kind::kLinear;
  } else if (hinges == 0 && entropies == 0) {
    kind_ = Kind::kQuadratic;
    p0_ = w_sum;
    p1_ = wa_sum / w_sum;
  } else if (hinges == 1 && quadratics == 0 && entropies == 0) {
    kind_ = Kind::kHinge;
  } else if (entropies == 1 && quadratics == 0 && hinges == 0) {
    kind_ = Kind::kEntropy;
  } else {
    kind_ = Kind::kFallback;
  }
}

ScalarResult CoordinateOracle::Solve(double c) const {
  const double ce = c + linear_;
  ScalarResult r;
  switch (kind_) {
    case Kind::kLinear:
      r = SolveLinearOrQuadraticTail(box_, ce, rho_);
      break;
    case Kind::kQuadratic:
      r = SolveQuadratic(p0_, p1_, box_, ce, rho_);
      break;
    case Kind::kHinge:
      r = SolveHinge(p0_, p1_, p2_, box_, ce, rho_);
      break;
    case Kind::kEntropy:
      r = SolveEntropy(p0_, box_, ce, rho_);
      break;
    case Kind::kFallback:
      r = SolveScalarFallback(atoms_, rho_, box_, c);
      return r;
  }
  // Recompute the value from the atoms so merged/folded terms report the
  // true F + <c, x>.
  double v = rho_ * r.x * r.x + c * r.x;
  for (const CostAtom& a : atoms_) v += AtomValue(a, r.x);
  r.value = v;
  return r;
}

LocalOracle::LocalOracle(const LocalProblem& local) {
  coords_.reserve(local.dim);
  for (int d = 0; d < local.dim; ++d) {
    coords_.emplace_back(local.AtomsOn(d), local.regularizer, local.box[d]);
  }
}

double LocalOracle::SolveInto(std::span<const double> c, std::span<double> x,
                              bool* tie_broken) const {
  double value = 0;
  bool tie = false;
  for (size_t d = 0; d < coords_.size(); ++d) {
    const ScalarResult r = coords_[d].Solve(c[d]);
    x[d] = r.x;
    value += r.value;
    tie = tie || r.tie_broken;
  }
  if (tie_broken) *tie_broken = tie;
  return value;
}

OracleResult LocalOracle::Solve(const Vector& c) const {
  OracleResult out;
  out.x.resize(static_cast<Eigen::Index>(coords_.size()));
  out.value = SolveInto(std::span<const double>(c.data(), c.size()),
                        std::span<double>(out.x.data(), out.x.size()),
                        &out.tie_broken);
  return out;
}

OracleResult SolveLocal(const LocalProblem& local, const Vector& c) {
  local.Validate();
  RequireDims(c.size() == local.dim, "linear coefficient dimension mismatch");
  return LocalOracle(local).Solve(c);
}

}  // namespace dualdec
