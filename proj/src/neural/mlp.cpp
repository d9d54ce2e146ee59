#include "emms/neural/mlp.hpp"

namespace emms::neural {

template struct Dense<float>;
template struct Dense<double>;
template struct Mlp<float>;
template struct Mlp<double>;
template class Adam<float>;
template class Adam<double>;

} // namespace emms::neural
