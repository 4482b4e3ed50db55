#pragma once

#include "msl/expr.hpp"

namespace msl::detail {

// Raw constructors: no simplification.
NodePtr make_constant(double c);
NodePtr make_variable(int index);
NodePtr make_binary(Op op, NodePtr a, NodePtr b);
NodePtr make_unary(Op op, NodePtr a);
NodePtr make_pow(NodePtr a, int exponent);

// Simplifying constructors: constant folding and 0/1 identities only.
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);
NodePtr neg(NodePtr a);
NodePtr pow(NodePtr a, int exponent);
NodePtr apply(Op fn, NodePtr a);

bool is_const(const NodePtr& n, double c);

int max_variable(const Node& n);

}  // namespace msl::detail
