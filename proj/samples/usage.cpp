// Walk-through of the library on the first reference example pair: eigenvalue
// bounds, a Loewner bound with its orthogonal witness, and a sharp constant.

#include <iostream>

#include "superquad/superquad.hpp"

using namespace superquad;

namespace {

void print(const char* label, const Vector& v) {
  std::cout << label << ":";
  for (Index i = 0; i < v.size(); ++i) std::cout << ' ' << v(i);
  std::cout << '\n';
}

}  // namespace

int main() {
  const SymmetricMatrix a{{5.0, -1.0}, {-1.0, 5.0}};
  const SymmetricMatrix b = SymmetricMatrix::diagonal({2.0, 4.0});

  // Concave decreasing f(t) = -t^{3/2}: lambda(f((A+B)/2)) <= lambda(S).
  const auto f = parse_function("neg_pow_q:3/2");
  const BoundReport s = concave_bound_S(f, a, b, 0.5);
  print("lambda(f(midpoint))", s.lhs_spectrum());
  print("lambda(S)          ", s.bound_spectrum());
  std::cout << "eigenvalue order holds: " << std::boolalpha << s.verdict.pass << '\n';

  // The same statement in Loewner form, rearranged as a reverse power mean.
  const BoundReport r = cor_power_mean_reverse(a, b, 1.5);
  std::cout << "(A^q+B^q)/2 <= V mid^q V^T + corrections: " << r.verdict.pass << " (margin " << r.verdict.margin
            << ")\n";

  // Convex side: the midpoint bound for t^2 has finite constants only when A - B
  // is definite.
  const SymmetricMatrix c = SymmetricMatrix::diagonal({6.0, 7.0});
  const BoundReport t = convex_bound_T(parse_function("pow_p:2"), a, c, 0.5);
  std::cout << "gamma at alpha = 1/2: " << std::get<double>(t.ingredients.at("gamma_alpha")) << '\n';
  std::cout << "K(1, 4, 2) = " << kantorovich_power(1.0, 4.0, 2.0) << '\n';

  const bool ok = s.verdict.pass && r.verdict.pass && t.verdict.pass;
  return ok ? 0 : 1;
}
