#pragma once

#include <Eigen/Dense>
#include <memory>

namespace monoflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class ConvexSet;
class ConvexFunction;
class MonotoneOperator;

using SetPtr = std::shared_ptr<const ConvexSet>;
using FunPtr = std::shared_ptr<const ConvexFunction>;
using OpPtr = std::shared_ptr<const MonotoneOperator>;

}  // namespace monoflow
