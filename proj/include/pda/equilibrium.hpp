#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pda {

struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Setting : std::uint8_t { Obos, Tbos };
enum class Role : std::uint8_t { Buyer, Seller };

// Supports of the uniform type distributions: theta_B ~ U[l_b, h_b],
// theta_S ~ U[l_s, h_s].
struct UniformBounds {
  double l_b{0.0}, h_b{1.0};
  double l_s{0.0}, h_s{1.0};

  bool valid() const {
    return l_b >= 0.0 && l_s >= 0.0 && l_b < h_b && l_s < h_s && std::isfinite(h_b) &&
           std::isfinite(h_s);
  }

  // x = (h_B^2 - l_B^2) / (h_B^3 - l_B^3)
  double x() const { return (h_b * h_b - l_b * l_b) / (h_b * h_b * h_b - l_b * l_b * l_b); }
  // y = (h_S^2 - l_S^2) / (h_S^3 - l_S^3)
  double y() const { return (h_s * h_s - l_s * l_s) / (h_s * h_s * h_s - l_s * l_s * l_s); }
};

// Scale-based strategy profile: bid = alpha_b * theta_B, ask = alpha_s * theta_S.
struct ScaleProfile {
  double alpha_b{1.0};
  double alpha_s{1.0};
};

enum class SolveMethod : std::uint8_t { ClosedForm, RootFind };

struct EquilibriumResult {
  ScaleProfile profile;
  bool feasible{false};
  SolveMethod method{SolveMethod::ClosedForm};
  int iterations{0};
  double residual_buyer{0.0};
  double residual_seller{0.0};
};

// Bid/ask coverage assumptions under which the scale-profile analysis holds.
inline bool feasibility_check(const UniformBounds& b, const ScaleProfile& p, Setting setting) {
  if (p.alpha_b <= 0.0 || p.alpha_s <= 0.0) return false;
  const bool bid_covered = (p.alpha_b / p.alpha_s) * b.h_b <= b.h_s + 1e-12;
  if (setting == Setting::Obos)
    return bid_covered && (p.alpha_s / p.alpha_b) * b.l_s >= b.l_b - 1e-12;
  return bid_covered && (p.alpha_s / p.alpha_b) * b.h_s <= b.h_b + 1e-12;
}

// One buyer, one seller: stationary point of the coupled reaction equations
//   alpha_B = 2/3 + alpha_S l_S x / 2,   alpha_S = 2/3 + alpha_B h_B y / 2,
// reduced to
//   alpha_S = (4/3)(2 + h_B y) / (4 - l_S h_B x y)
//   alpha_B = (4/3)(2 + l_S x) / (4 - l_S h_B x y).
inline ScaleProfile obos_closed_form(const UniformBounds& b) {
  if (!b.valid()) throw DegenerateError("obos_closed_form: invalid bounds");
  const double x = b.x();
  const double y = b.y();
  const double den = 4.0 - b.l_s * b.h_b * x * y;
  if (std::abs(den) < 1e-12) throw DegenerateError("obos_closed_form: zero denominator");
  return ScaleProfile{(4.0 / 3.0) * (2.0 + b.l_s * x) / den,
                      (4.0 / 3.0) * (2.0 + b.h_b * y) / den};
}

// The two OBOS reaction equations, exposed for verification.
inline double obos_buyer_reaction(const UniformBounds& b, double alpha_s) {
  return 2.0 / 3.0 + alpha_s * b.l_s * b.x() / 2.0;
}

inline double obos_seller_reaction(const UniformBounds& b, double alpha_b) {
  return 2.0 / 3.0 + alpha_b * b.h_b * b.y() / 2.0;
}

// Two buyers, one seller on unit supports: alpha_B = 3/4 and alpha_S solves
// -alpha_S^2 + alpha_S/2 + 9/16 = 0; the negative root is discarded.
inline ScaleProfile tbos_unit_closed_form() {
  return ScaleProfile{0.75, (1.0 + std::sqrt(10.0)) / 4.0};
}

struct FocResiduals {
  double buyer{0.0};
  double seller{0.0};
};

// Left-hand sides of the two printed TBOS first-order conditions; both are
// zero at a stationary profile.
inline FocResiduals tbos_foc_residuals(const UniformBounds& b, const ScaleProfile& p) {
  if (p.alpha_b <= 0.0 || p.alpha_s <= 0.0)
    throw std::invalid_argument("tbos_foc_residuals: alphas must be > 0");
  const double lb = b.l_b, hb = b.h_b, ls = b.l_s, hs = b.h_s;
  const double ab = p.alpha_b, as = p.alpha_s;

  const double r_buyer =
      (ab / (6.0 * as)) * (-2.0 * hb * hb * hb + 4.0 * lb * lb * lb + lb * lb * hb -
                           2.0 * lb * hb * hb) +
      (as / (4.0 * ab * ab)) * (hb * ls * ls + lb * ls * ls) +
      ls * (hb * hb - 2.0 * lb * lb - 2.0 * hb * lb) / 12.0 +
      (3.0 * hb * hb * hb - 4.0 * lb * lb * lb - 4.0 * hb * lb * lb - lb * hb * hb) /
          (12.0 * as);

  const double hs4 = hs * hs * hs * hs - ls * ls * ls * ls;
  const double hs3 = hs * hs * hs - ls * ls * ls;
  const double hs2 = hs * hs - ls * ls;
  const double r_seller = -(as * as / (4.0 * ab * ab)) * hs4 +
                          (as / ab) * (hs4 / (4.0 * ab) + hs3 * (3.0 * lb - hb) / 6.0) -
                          (lb / ab) * hs3 / 3.0 + (hs2 / 2.0) * (hb * hb / 2.0 - hb * lb / 2.0);
  return FocResiduals{r_buyer, r_seller};
}

namespace detail {

// One damped-Newton attempt; false when the line search stalls or the
// Jacobian degenerates before the budget runs out.
inline bool tbos_newton_attempt(const UniformBounds& bounds, ScaleProfile start, int budget,
                                ScaleProfile& out, FocResiduals& out_r, int& used) {
  constexpr double kTol = 1e-9;
  constexpr double kStep = 1e-6;
  constexpr double kFloor = 1e-4;  // keep clear of the Jacobian stencil
  const auto norm = [](const FocResiduals& r) {
    return std::max(std::abs(r.buyer), std::abs(r.seller));
  };

  ScaleProfile p = start;
  FocResiduals r = tbos_foc_residuals(bounds, p);
  used = 0;
  while (norm(r) >= kTol) {
    if (used >= budget) return false;
    const auto rb = [&](double ab, double as) {
      return tbos_foc_residuals(bounds, ScaleProfile{ab, as});
    };
    const FocResiduals fpb = rb(p.alpha_b + kStep, p.alpha_s);
    const FocResiduals fmb = rb(p.alpha_b - kStep, p.alpha_s);
    const FocResiduals fps = rb(p.alpha_b, p.alpha_s + kStep);
    const FocResiduals fms = rb(p.alpha_b, p.alpha_s - kStep);
    const double j00 = (fpb.buyer - fmb.buyer) / (2.0 * kStep);
    const double j01 = (fps.buyer - fms.buyer) / (2.0 * kStep);
    const double j10 = (fpb.seller - fmb.seller) / (2.0 * kStep);
    const double j11 = (fps.seller - fms.seller) / (2.0 * kStep);
    const double det = j00 * j11 - j01 * j10;
    if (std::abs(det) < 1e-14) return false;
    const double db = (r.buyer * j11 - r.seller * j01) / det;
    const double ds = (r.seller * j00 - r.buyer * j10) / det;

    // halve the step while the residual does not improve or positivity breaks
    double lambda = 1.0;
    ScaleProfile cand;
    FocResiduals rc;
    for (;;) {
      cand = ScaleProfile{p.alpha_b - lambda * db, p.alpha_s - lambda * ds};
      if (cand.alpha_b > kFloor && cand.alpha_s > kFloor) {
        rc = tbos_foc_residuals(bounds, cand);
        if (norm(rc) < norm(r)) break;
      }
      lambda *= 0.5;
      if (lambda < 1e-12) return false;  // stalled; caller restarts elsewhere
    }
    p = cand;
    r = rc;
    ++used;
  }
  out = p;
  out_r = r;
  return true;
}

}  // namespace detail

// Damped Newton with a central-difference Jacobian on the two TBOS FOCs. A
// stalled line search restarts from a deterministic ladder of alternative
// profiles within the same iteration budget.
inline EquilibriumResult tbos_general_solve(const UniformBounds& bounds, ScaleProfile init,
                                            int max_iterations = 200) {
  if (init.alpha_b <= 0.0 || init.alpha_s <= 0.0)
    throw std::invalid_argument("tbos_general_solve: init must be positive");

  const ScaleProfile restarts[] = {init,         {0.75, 1.0},  {1.0, 1.0},
                                   {0.75, 1.25}, {0.5, 1.5},   {1.25, 0.9},
                                   {0.9, 0.6},   {1.5, 1.5}};
  int remaining = max_iterations;
  int total_used = 0;
  for (const auto& start : restarts) {
    if (remaining <= 0) break;
    ScaleProfile p;
    FocResiduals r;
    int used = 0;
    const bool ok = detail::tbos_newton_attempt(bounds, start, remaining, p, r, used);
    total_used += used;
    remaining -= std::max(used, 1);
    if (!ok) continue;
    EquilibriumResult result;
    result.profile = p;
    result.feasible = feasibility_check(bounds, p, Setting::Tbos);
    result.method = SolveMethod::RootFind;
    result.iterations = total_used;
    result.residual_buyer = r.buyer;
    result.residual_seller = r.seller;
    return result;
  }
  throw NoConvergenceError("tbos_general_solve: no convergence after " +
                           std::to_string(max_iterations) + " iterations");
}

}  // namespace pda
