#pragma once

#include <memory>
#include <string>
#include <vector>

namespace mincap {

/// Closed-form warp expression in the single variable `r`.
///
/// Grammar: numbers, `r`, `pi`, `+ - * /`, unary minus, parentheses and the
/// calls pow(a,b), exp, log, sin, cos, abs, min(a,b), max(a,b). `^` is
/// accepted as a synonym for pow. Evaluation runs in long double.
class Expression {
 public:
  static Expression parse(const std::string& source);

  long double evaluate(long double r) const;
  const std::string& source() const noexcept { return source_; }

  struct Node;

 private:
  Expression(std::string source, std::shared_ptr<const Node> root)
      : source_(std::move(source)), root_(std::move(root)) {}

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace mincap
