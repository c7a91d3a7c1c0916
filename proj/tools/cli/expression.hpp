#pragma once

// A small arithmetic expression language for deformation speeds and weight
// functions:
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = ("+" | "-") unary | power ;
//   power   = primary [ "^" unary ] ;            (right associative)
//   primary = number | variable | constant
//           | function "(" expr ")" | "(" expr ")" ;
//   variable = "u1" | "u2" | "u3" | "u" | "v"      (chart coordinates)
//            | "x1" | ... | "x5" | "x" | "y" | "z" | "w" ;  (ambient)
//   constant = "pi" ;
//   function = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "abs" ;

#include "wsigma/core.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>

namespace wsigma::cli {

class ExpressionError : public Error {
 public:
  using Error::Error;
};

class Expression {
 public:
  static constexpr int kMaxChart = 3;
  static constexpr int kMaxAmbient = 5;

  Expression() = default;

  static Expression parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.text_ = text;
    e.node_ = p.parse_all(e.chart_used_, e.ambient_used_);
    return e;
  }

  bool empty() const { return !node_; }
  const std::string& text() const { return text_; }
  /// Highest chart / ambient coordinate referenced (1-based; 0 if none).
  int chart_used() const { return chart_used_; }
  int ambient_used() const { return ambient_used_; }

  double operator()(const Vec& chart, const Vec& ambient) const {
    if (!node_) throw ExpressionError("evaluating an empty expression");
    Vars v{&chart, &ambient};
    return node_->eval(v);
  }

 private:
  struct Vars {
    const Vec* chart;
    const Vec* ambient;
  };
  struct Node {
    virtual ~Node() = default;
    virtual double eval(const Vars& v) const = 0;
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Number : Node {
    double value;
    explicit Number(double x) : value(x) {}
    double eval(const Vars&) const override { return value; }
  };
  struct Variable : Node {
    bool ambient;
    int index;
    Variable(bool a, int i) : ambient(a), index(i) {}
    double eval(const Vars& v) const override {
      const Vec& src = ambient ? *v.ambient : *v.chart;
      if (index >= src.size())
        throw ExpressionError(std::string(ambient ? "x" : "u") + std::to_string(index + 1) +
                              " is not defined for this fixture");
      return src(index);
    }
  };
  struct Unary : Node {
    std::function<double(double)> fn;
    NodePtr arg;
    Unary(std::function<double(double)> f, NodePtr a) : fn(std::move(f)), arg(std::move(a)) {}
    double eval(const Vars& v) const override { return fn(arg->eval(v)); }
  };
  struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(const Vars& v) const override {
      const double a = lhs->eval(v), b = rhs->eval(v);
      switch (op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
  };

  class Parser {
   public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all(int& chart_used, int& ambient_used) {
      NodePtr n = expr();
      skip();
      if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
      chart_used = chart_used_;
      ambient_used = ambient_used_;
      return n;
    }

   private:
    [[noreturn]] void fail(const std::string& what) const {
      throw ExpressionError("expression \"" + s_ + "\": " + what + " at position " + std::to_string(pos_ + 1));
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

    NodePtr expr() {
      NodePtr n = term();
      for (;;) {
        if (accept('+')) n = std::make_shared<Binary>('+', n, term());
        else if (accept('-')) n = std::make_shared<Binary>('-', n, term());
        else return n;
      }
    }
    NodePtr term() {
      NodePtr n = unary();
      for (;;) {
        if (accept('*')) n = std::make_shared<Binary>('*', n, unary());
        else if (accept('/')) n = std::make_shared<Binary>('/', n, unary());
        else return n;
      }
    }
    NodePtr unary() {
      if (accept('-')) return std::make_shared<Unary>([](double x) { return -x; }, unary());
      if (accept('+')) return unary();
      return power();
    }
    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) return std::make_shared<Binary>('^', base, unary());
      return base;
    }
    NodePtr primary() {
      skip();
      if (pos_ >= s_.size()) fail("unexpected end of input");
      const char c = s_[pos_];
      if (accept('(')) {
        NodePtr n = expr();
        if (!accept(')')) fail("expected ')'");
        return n;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) return word();
      fail("unexpected '" + std::string(1, c) + "'");
    }
    NodePtr number() {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double x = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return std::make_shared<Number>(x);
    }
    NodePtr word() {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string w = s_.substr(start, pos_ - start);
      if (w == "pi") return std::make_shared<Number>(std::numbers::pi);
      if (auto fn = function(w)) {
        if (!accept('(')) fail("expected '(' after " + w);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return std::make_shared<Unary>(fn, arg);
      }
      const auto var = variable(w);
      if (var.first < 0) {
        pos_ = start;
        fail("unknown name '" + w + "'");
      }
      const bool amb = var.second;
      const int idx = var.first;
      if (amb) ambient_used_ = std::max(ambient_used_, idx + 1);
      else chart_used_ = std::max(chart_used_, idx + 1);
      return std::make_shared<Variable>(amb, idx);
    }
    static std::function<double(double)> function(const std::string& w) {
      if (w == "sin") return [](double x) { return std::sin(x); };
      if (w == "cos") return [](double x) { return std::cos(x); };
      if (w == "tan") return [](double x) { return std::tan(x); };
      if (w == "exp") return [](double x) { return std::exp(x); };
      if (w == "log") return [](double x) { return std::log(x); };
      if (w == "sqrt") return [](double x) { return std::sqrt(x); };
      if (w == "abs") return [](double x) { return std::abs(x); };
      return {};
    }
    /// (index, ambient?) or (-1, _).
    static std::pair<int, bool> variable(const std::string& w) {
      if (w == "u") return {0, false};
      if (w == "v") return {1, false};
      if (w == "x") return {0, true};
      if (w == "y") return {1, true};
      if (w == "z") return {2, true};
      if (w == "w") return {3, true};
      if (w.size() == 2 && (w[0] == 'u' || w[0] == 'x') && std::isdigit(static_cast<unsigned char>(w[1]))) {
        const int i = w[1] - '1';
        const bool amb = w[0] == 'x';
        if (i >= 0 && i < (amb ? kMaxAmbient : kMaxChart)) return {i, amb};
      }
      return {-1, false};
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int chart_used_ = 0;
    int ambient_used_ = 0;
  };

  std::string text_;
  NodePtr node_;
  int chart_used_ = 0;
  int ambient_used_ = 0;
};

}  // namespace wsigma::cli
