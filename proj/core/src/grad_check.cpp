#include "liclab/grad_check.hpp"

#include <cmath>

namespace liclab {

GradCheckResult finite_difference_check(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double h) {
  if (h <= 0.0) throw Error("finite_difference_check: h must be > 0");

  Tensor probe = x.detach(false);
  Tensor out1 = f(probe);
  Tensor out2 = f(probe);
  if (!out1.is_scalar())
    throw Error("finite_difference_check: f must return a scalar, got " +
                shape_str(out1.shape()));
  if (out1.data()[0] != out2.data()[0] ||
      out1.item_precise() != out2.item_precise())
    throw Error("finite_difference_check: f is not deterministic");

  Tensor xg = x.detach(true);
  Tensor out = f(xg);
  backward(out);
  const std::vector<float> analytic = xg.grad();

  GradCheckResult res;
  res.nonsmooth = out.node()->nonsmooth;

  Tensor xp = x.detach(false);
  for (size_t i = 0; i < xp.data().size(); ++i) {
    const float orig = xp.data()[i];
    const float hi = static_cast<float>(orig + h);
    const float lo = static_cast<float>(orig - h);
    xp.data()[i] = hi;
    const double fp = f(xp).item_precise();
    xp.data()[i] = lo;
    const double fm = f(xp).item_precise();
    xp.data()[i] = orig;
    // divide by the realized float32 step, not the nominal one
    const double central =
        (fp - fm) / (static_cast<double>(hi) - static_cast<double>(lo));
    const double a = analytic[i];
    const double denom =
        std::max({std::fabs(a), std::fabs(central), 1e-8});
    const float rel = static_cast<float>(std::fabs(a - central) / denom);
    res.max_rel_error = std::max(res.max_rel_error, rel);
  }
  return res;
}

}  // namespace liclab
