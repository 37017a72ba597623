#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "shellhier/jet.hpp"

namespace shellhier {

/// Scalar expression in the chart coordinates u, v and the ambient position
/// x, y, z of the chart point. Supports + - * / ^, unary minus, the constants
/// pi and e, and sin cos tan exp log sqrt sinh cosh atan pow.
class Expression {
 public:
  Expression() = default;

  /// Throws BadConfig on a syntax error or unknown identifier.
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  Jet eval(const Jet& u, const Jet& v, const std::array<Jet, 3>& position) const;
  double eval(double u, double v, const Vec3& position) const;

  const std::string& text() const { return text_; }
  bool is_zero() const;

  struct Node;

 private:
  std::string text_ = "0";
  std::shared_ptr<const Node> root_;
};

}  // namespace shellhier
