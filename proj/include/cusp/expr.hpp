#pragma once

#include <memory>
#include <string>

#include "cusp/core.hpp"

namespace cusp::expr {

// Tiny arithmetic grammar for user-supplied perturbations:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('+'|'-') factor | power
//   power  := atom ('^' factor)?
//   atom   := number | 'a' | 'b' | 'z' | 'eps' | 'exp' '(' expr ')' | '(' expr ')'
// Parse errors carry the offending position.
class Compiled {
public:
    struct Node;
    explicit Compiled(std::shared_ptr<const Node> root, std::string source);
    double operator()(const StatePoint& p) const;
    const std::string& source() const { return src_; }

private:
    std::shared_ptr<const Node> root_;
    std::string src_;
};

Compiled compile(const std::string& text);

// Convenience: compiled expression as a core ScalarField.
ScalarField compile_field(const std::string& text);

} // namespace cusp::expr
