// Writes a synthetic extraction run (and the programs as JSONL) for the CLI smoke test.
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "synthetic.hpp"

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: make_synthetic_run <run dir> <corpus.jsonl> [programs] [statements]\n");
        return 2;
    }
    const std::size_t count = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 40;
    const int statements = argc > 4 ? std::atoi(argv[4]) : 25;
    const auto programs = synth::random_corpus(5, count, statements);
    codeattn::write_run(synth::synthetic_run(programs, {2, 2, 8, 3}, "smoke"), argv[1]);
    std::ofstream out(argv[2]);
    for (const auto& [id, code] : programs) out << nlohmann::json{{"id", id}, {"code", code}}.dump() << '\n';
    return 0;
}
