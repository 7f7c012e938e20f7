#include <iostream>

#include "moonlab/selftest.hpp"

int main() {
    const moonlab::selftest::SuiteResult result = moonlab::selftest::run({}, std::cout);
    return result.passed() ? 0 : 1;
}
