#include <doctest.h>

#include <fstream>
#include <sstream>
#include <sys/resource.h>

#include "support/cli_runner.hpp"

using clirun::quote;

namespace {

long child_peak_kb() {
    rusage ru{};
    getrusage(RUSAGE_CHILDREN, &ru);
    return ru.ru_maxrss;
}

std::filesystem::path write_records(const clirun::TempDir& dir, const std::string& name, int n) {
    const auto p = dir.path() / name;
    std::ofstream out(p, std::ios::binary);
    const std::string filler(480, 'x');
    for (int i = 0; i < n; ++i) {
        out << R"({"id":)" << i << R"(,"text":"{\"a\":)" << (i % 3 == 0 ? "\\\"" + filler + "\\\"" : std::to_string(i))
            << R"(,\"note\":\")" << filler << R"(\"}"})" << '\n';
    }
    return p;
}

}  // namespace

// RUSAGE_CHILDREN reports the largest child seen so far, so this test lives
// in its own executable and runs the small input first.
TEST_CASE("score streams: peak memory does not grow with input size") {
    clirun::TempDir dir;
    const std::string schema = R"({"type":"object","properties":{"a":{"type":"integer"}}})";
    const auto small = write_records(dir, "small.jsonl", 10000);
    const auto large = write_records(dir, "large.jsonl", 100000);
    REQUIRE(std::filesystem::file_size(large) > 60u * 1024 * 1024);

    auto r = clirun::run(JSONREWARD_CLI, "score --schema " + quote(schema) + " --input " + quote(small), dir);
    REQUIRE(r.code == 0);
    const long small_kb = child_peak_kb();
    r = clirun::run(JSONREWARD_CLI, "score --schema " + quote(schema) + " --input - < " + quote(large), dir);
    REQUIRE(r.code == 0);
    const long large_kb = child_peak_kb();

    std::istringstream in(r.out);
    std::string line, last;
    long lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        last = line;
    }
    CHECK(lines == 100000);
    CHECK(last.find(R"("id":99999)") != std::string::npos);
    MESSAGE("peak rss small=" << small_kb << "kB large=" << large_kb << "kB");
    CHECK(large_kb < small_kb + 16 * 1024);
}
