#include "ranger21/numfmt.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace ranger21 {

std::string format_double(double x) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                   std::chars_format::general, 17);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
    double x = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return x;
}

}  // namespace ranger21
