#include "ranger21/problems/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ranger21/numfmt.hpp"
#include "ranger21/problems/rng.hpp"

namespace ranger21::problems {

Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t dims, std::size_t classes,
                   double separation) {
    if (classes < 2 || n < classes) {
        throw std::invalid_argument("make_blobs: need n >= classes >= 2");
    }
    if (dims == 0) {
        throw std::invalid_argument("make_blobs: dims must be >= 1");
    }
    if (!(separation >= 0.0) || !std::isfinite(separation)) {
        throw std::invalid_argument("make_blobs: separation must be finite and >= 0");
    }
    Rng rng(seed);

    std::vector<double> centres(classes * dims);
    for (std::size_t c = 0; c < classes; ++c) {
        double norm_sq = 0.0;
        auto* centre = centres.data() + c * dims;
        do {
            norm_sq = 0.0;
            for (std::size_t j = 0; j < dims; ++j) {
                centre[j] = rng.normal();
                norm_sq += centre[j] * centre[j];
            }
        } while (norm_sq == 0.0);
        const double scale = separation / std::sqrt(norm_sq);
        for (std::size_t j = 0; j < dims; ++j) {
            centre[j] *= scale;
        }
    }

    Dataset data;
    data.dims = dims;
    data.classes = classes;
    data.seed = seed;
    data.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        data.labels[i] = i % classes;
    }
    rng.shuffle(std::span<std::size_t>(data.labels));

    data.inputs.resize(n * dims);
    for (std::size_t i = 0; i < n; ++i) {
        const double* centre = centres.data() + data.labels[i] * dims;
        for (std::size_t j = 0; j < dims; ++j) {
            data.inputs[i * dims + j] = centre[j] + rng.normal();
        }
    }
    return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (std::size_t j = 0; j < data.dims; ++j) {
        out << 'x' << j << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dims; ++j) {
            out << format_double(data.inputs[i * data.dims + j]) << ',';
        }
        out << data.labels[i] << '\n';
    }
    if (!out) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(path.string() + ": missing header");
    }
    Dataset data;
    {
        std::istringstream header(line);
        std::string field;
        std::size_t col = 0;
        bool saw_label = false;
        while (std::getline(header, field, ',')) {
            if (saw_label) {
                throw std::runtime_error(path.string() + ": 'label' must be the last column");
            }
            if (field == "label") {
                saw_label = true;
            } else if (field != "x" + std::to_string(col)) {
                throw std::runtime_error(path.string() + ": unexpected header field '" + field + "'");
            }
            ++col;
        }
        if (!saw_label || col < 2) {
            throw std::runtime_error(path.string() + ": header must be x0..x{d-1},label");
        }
        data.dims = col - 1;
    }
    std::size_t line_no = 1;
    std::size_t max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::size_t col = 0;
        while (std::getline(row, field, ',')) {
            try {
                if (col < data.dims) {
                    data.inputs.push_back(parse_double(field));
                } else if (col == data.dims) {
                    const auto label = static_cast<std::size_t>(std::stoull(field));
                    data.labels.push_back(label);
                    max_label = std::max(max_label, label);
                }
            } catch (const std::exception& e) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            ++col;
        }
        if (col != data.dims + 1) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(data.dims + 1) + " fields");
        }
    }
    data.classes = data.labels.empty() ? 0 : max_label + 1;
    return data;
}

}  // namespace ranger21::problems
