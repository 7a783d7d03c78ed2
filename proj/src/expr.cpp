#include "syz/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "syz/errors.hpp"

namespace syz {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Func };

struct Expr::Node {
  Op op;
  std::complex<double> value{};
  std::string name;  // variable or function name
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;
using cplx = std::complex<double>;

NodeP make(Op op, NodeP a = nullptr, NodeP b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodeP make_const(cplx v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodeP make_var(std::string name) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Var;
  n->name = std::move(name);
  return n;
}

NodeP make_func(std::string name, NodeP arg) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Func;
  n->name = std::move(name);
  n->a = std::move(arg);
  return n;
}

bool is_const(const NodeP& n, cplx v) { return n->op == Op::Const && n->value == v; }

// Constructors with light folding so that derivatives stay readable.
NodeP add(NodeP a, NodeP b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
  return make(Op::Add, a, b);
}
NodeP sub(NodeP a, NodeP b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
  if (is_const(a, 0.0)) return make(Op::Neg, b);
  return make(Op::Sub, a, b);
}
NodeP mul(NodeP a, NodeP b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
  return make(Op::Mul, a, b);
}
NodeP divide(NodeP a, NodeP b) {
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::Div, a, b);
}
NodeP neg(NodeP a) {
  if (a->op == Op::Const) return make_const(-a->value);
  return make(Op::Neg, a);
}
NodeP power(NodeP a, NodeP b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return make_const(1.0);
  return make(Op::Pow, a, b);
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodeP parse() {
    NodeP e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, "expr", "parse",
                what + " at column " + std::to_string(pos_ + 1) + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodeP expr() {
    NodeP lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }
  NodeP term() {
    NodeP lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Op::Div, lhs, unary());
      else return lhs;
    }
  }
  NodeP unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return pow_expr();
  }
  NodeP pow_expr() {
    NodeP base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }
  NodeP primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (accept('(')) {
      NodeP e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        size_t save = pos_;
        ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      std::string num(s_.substr(start, pos_ - start));
      try {
        size_t used = 0;
        double v = std::stod(num, &used);
        if (used != num.size()) fail("malformed number '" + num + "'");
        return make_const(v);
      } catch (const std::logic_error&) {
        fail("malformed number '" + num + "'");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id(s_.substr(start, pos_ - start));
      if (accept('(')) {
        static const char* funcs[] = {"sqrt", "exp", "log", "sin", "cos"};
        bool known = false;
        for (const char* f : funcs) known = known || id == f;
        if (!known) fail("unknown function '" + id + "'");
        NodeP arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make_func(id, arg);
      }
      if (id == "pi") return make_const(M_PI);
      if (id == "e") return make_const(M_E);
      if (id == "i") return make_const(cplx(0.0, 1.0));
      return make_var(id);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }
};

template <class T>
T apply_func(const std::string& name, T x) {
  if (name == "sqrt") return std::sqrt(x);
  if (name == "exp") return std::exp(x);
  if (name == "log") return std::log(x);
  if (name == "sin") return std::sin(x);
  return std::cos(x);
}

double eval_real(const NodeP& n, const std::map<std::string, double>& vars) {
  switch (n->op) {
    case Op::Const:
      if (n->value.imag() != 0.0)
        throw Error(ErrorKind::Domain, "expr", "eval", "imaginary constant in a real expression");
      return n->value.real();
    case Op::Var: {
      auto it = vars.find(n->name);
      if (it == vars.end()) throw Error(ErrorKind::Domain, "expr", "eval", "unbound variable '" + n->name + "'");
      return it->second;
    }
    case Op::Add: return eval_real(n->a, vars) + eval_real(n->b, vars);
    case Op::Sub: return eval_real(n->a, vars) - eval_real(n->b, vars);
    case Op::Mul: return eval_real(n->a, vars) * eval_real(n->b, vars);
    case Op::Div: return eval_real(n->a, vars) / eval_real(n->b, vars);
    case Op::Neg: return -eval_real(n->a, vars);
    case Op::Pow: {
      double base = eval_real(n->a, vars);
      double ex = eval_real(n->b, vars);
      return std::pow(base, ex);
    }
    case Op::Func: return apply_func(n->name, eval_real(n->a, vars));
  }
  return 0.0;
}

cplx eval_cplx(const NodeP& n, const std::map<std::string, cplx>& vars) {
  switch (n->op) {
    case Op::Const: return n->value;
    case Op::Var: {
      auto it = vars.find(n->name);
      if (it == vars.end()) throw Error(ErrorKind::Domain, "expr", "eval", "unbound variable '" + n->name + "'");
      return it->second;
    }
    case Op::Add: return eval_cplx(n->a, vars) + eval_cplx(n->b, vars);
    case Op::Sub: return eval_cplx(n->a, vars) - eval_cplx(n->b, vars);
    case Op::Mul: return eval_cplx(n->a, vars) * eval_cplx(n->b, vars);
    case Op::Div: return eval_cplx(n->a, vars) / eval_cplx(n->b, vars);
    case Op::Neg: return -eval_cplx(n->a, vars);
    case Op::Pow: {
      cplx base = eval_cplx(n->a, vars);
      cplx ex = eval_cplx(n->b, vars);
      // Integer powers stay exact and well defined at base 0.
      if (ex.imag() == 0.0 && ex.real() == std::round(ex.real()) && std::abs(ex.real()) < 64) {
        int k = static_cast<int>(ex.real());
        cplx r = 1.0;
        for (int j = 0; j < std::abs(k); ++j) r *= base;
        return k >= 0 ? r : 1.0 / r;
      }
      return std::pow(base, ex);
    }
    case Op::Func: return apply_func(n->name, eval_cplx(n->a, vars));
  }
  return 0.0;
}

NodeP derive(const NodeP& n, const std::string& v) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(n->name == v ? 1.0 : 0.0);
    case Op::Add: return add(derive(n->a, v), derive(n->b, v));
    case Op::Sub: return sub(derive(n->a, v), derive(n->b, v));
    case Op::Neg: return neg(derive(n->a, v));
    case Op::Mul: return add(mul(derive(n->a, v), n->b), mul(n->a, derive(n->b, v)));
    case Op::Div:
      return divide(sub(mul(derive(n->a, v), n->b), mul(n->a, derive(n->b, v))), power(n->b, make_const(2.0)));
    case Op::Pow: {
      NodeP da = derive(n->a, v);
      NodeP db = derive(n->b, v);
      if (is_const(db, 0.0)) {
        NodeP ex_minus_one = sub(n->b, make_const(1.0));
        return mul(mul(n->b, power(n->a, ex_minus_one)), da);
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      NodeP inner = add(mul(db, make_func("log", n->a)), divide(mul(n->b, da), n->a));
      return mul(n, inner);
    }
    case Op::Func: {
      NodeP da = derive(n->a, v);
      NodeP outer;
      if (n->name == "sqrt") outer = divide(make_const(0.5), n);
      else if (n->name == "exp") outer = n;
      else if (n->name == "log") outer = divide(make_const(1.0), n->a);
      else if (n->name == "sin") outer = make_func("cos", n->a);
      else outer = neg(make_func("sin", n->a));
      return mul(outer, da);
    }
  }
  return make_const(0.0);
}

bool depends(const NodeP& n, const std::string& v) {
  if (!n) return false;
  if (n->op == Op::Var) return n->name == v;
  return depends(n->a, v) || depends(n->b, v);
}

bool has_var(const NodeP& n) {
  if (!n) return false;
  if (n->op == Op::Var) return true;
  return has_var(n->a) || has_var(n->b);
}

void print(const NodeP& n, std::ostringstream& os) {
  switch (n->op) {
    case Op::Const:
      if (n->value.imag() == 0.0) os << n->value.real();
      else os << "(" << n->value.real() << "+" << n->value.imag() << "*i)";
      return;
    case Op::Var: os << n->name; return;
    case Op::Neg: os << "(-"; print(n->a, os); os << ")"; return;
    case Op::Func: os << n->name << "("; print(n->a, os); os << ")"; return;
    default: break;
  }
  const char* sym = n->op == Op::Add ? "+" : n->op == Op::Sub ? "-" : n->op == Op::Mul ? "*" : n->op == Op::Div ? "/" : "^";
  os << "(";
  print(n->a, os);
  os << sym;
  print(n->b, os);
  os << ")";
}

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }
Expr Expr::constant(std::complex<double> value) { return Expr(make_const(value)); }
Expr Expr::variable(std::string name) { return Expr(make_var(std::move(name))); }

double Expr::eval(const std::map<std::string, double>& vars) const { return eval_real(node_, vars); }
std::complex<double> Expr::eval_complex(const std::map<std::string, std::complex<double>>& vars) const {
  return eval_cplx(node_, vars);
}
Expr Expr::diff(const std::string& var) const { return Expr(derive(node_, var)); }
bool Expr::depends_on(const std::string& var) const { return depends(node_, var); }
bool Expr::is_constant() const { return !has_var(node_); }
std::string Expr::str() const {
  std::ostringstream os;
  os.precision(17);
  print(node_, os);
  return os.str();
}

}  // namespace syz
