#include "emms/neural/bundle_io.hpp"

namespace emms::neural {

template void save_bundle<float>(const ModelBundle<float>&, const std::filesystem::path&);
template void save_bundle<double>(const ModelBundle<double>&, const std::filesystem::path&);
template ModelBundle<float> load_bundle<float>(const std::filesystem::path&);
template ModelBundle<double> load_bundle<double>(const std::filesystem::path&);

} // namespace emms::neural
