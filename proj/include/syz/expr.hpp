#pragma once

// Small symbolic expression type used for path specifications (t(h), q(h))
// and for the unit function c(z) of local models. Supports + - * / ^, unary
// minus, sqrt, exp, log, sin, cos and the constants pi, e, i.

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace syz {

class Expr {
 public:
  struct Node;

  Expr();  // the constant 0
  static Expr parse(std::string_view text);
  static Expr constant(std::complex<double> value);
  static Expr variable(std::string name);

  double eval(const std::map<std::string, double>& vars) const;
  std::complex<double> eval_complex(const std::map<std::string, std::complex<double>>& vars) const;

  Expr diff(const std::string& var) const;
  bool depends_on(const std::string& var) const;
  bool is_constant() const;
  std::string str() const;

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

}  // namespace syz
