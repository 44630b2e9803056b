// Scalar reference backend.
#include "kernel_impl.hpp"

namespace ellattr::kernels {

namespace {
using impl = detail::batch_kernels<detail::vec1, detail::vec1>;
}

const batch_ops scalar_ops = {
    "scalar",
    &impl::eval_poly,
    &impl::map_step,
    &impl::point_proximity,
    &impl::curve_proximity,
};

}  // namespace ellattr::kernels
