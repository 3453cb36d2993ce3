#pragma once

#include <functional>

#include "doctest.h"
#include "semrd/error.hpp"

inline semrd::Errc error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const semrd::Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return semrd::Errc::InvalidArgument;
}

#define CHECK_ERRC(expr, code) CHECK(error_code([&] { (void)(expr); }) == (code))
