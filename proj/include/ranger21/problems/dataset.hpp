#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace ranger21::problems {

struct Dataset {
    std::size_t dims = 0;
    std::size_t classes = 0;
    std::uint64_t seed = 0;
    std::vector<double> inputs;        // samples x dims, row-major
    std::vector<std::size_t> labels;   // in [0, classes)

    std::size_t size() const noexcept { return labels.size(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Gaussian blobs: class c is centred at separation * u_c, where the u_c are
/// random unit vectors, with unit-variance isotropic noise. Labels are
/// balanced (counts differ by at most one) and shuffled. Pure function of
/// its arguments.
Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t dims, std::size_t classes,
                   double separation);

/// CSV with header x0,...,x{d-1},label and 17 significant digits per value.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Reads a file written by write_dataset_csv. The class count is taken as
/// max(label) + 1 and the seed is unknown (0).
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace ranger21::problems
