#pragma once

#include "cinnamon/interp.hpp"

#include <boost/container/small_vector.hpp>

#include <cstddef>
#include <utility>
#include <vector>

namespace cinnamon::detail {

/// (operand position, value before the write)
using OperandWrites = boost::container::small_vector<std::pair<std::size_t, Value>, 2>;

/// Forward action over resolved operands; returns the FAILURE flag.
bool forward(PrimKind kind, Value* const* ops, OperandWrites* writes);

/// Backward action over resolved operands.
void backward(PrimKind kind, Value* const* ops, OperandWrites* writes);

} // namespace cinnamon::detail
