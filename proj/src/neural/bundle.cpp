#include "emms/neural/bundle.hpp"

namespace emms::neural {

template struct ModelBundle<float>;
template struct ModelBundle<double>;

} // namespace emms::neural
