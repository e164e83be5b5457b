#ifndef FHT_QUADRATURE_HPP
#define FHT_QUADRATURE_HPP

#include <stdexcept>
#include <utility>

namespace fht {

// Composite Simpson rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels < 2 || panels % 2 != 0)
    throw std::invalid_argument("simpson: panels must be even and >= 2");
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < panels; i += 2) odd += f(a + i * h);
  for (int i = 2; i < panels; i += 2) even += f(a + i * h);
  sum += 4.0 * odd + 2.0 * even;
  return sum * h / 3.0;
}

}  // namespace fht

#endif
