// Minimal stand-in for an external CAD command, used by the oracle tests.
// Usage: stub_solver [--sleep SECONDS] [--exit CODE] INPUT ORDERING TIMEOUT
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
    double sleep_seconds = 0;
    int exit_code = 0;
    int positional = 0;
    bool input_seen = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--sleep") == 0 && i + 1 < argc) {
            sleep_seconds = std::atof(argv[++i]);
        } else if (std::strcmp(argv[i], "--exit") == 0 && i + 1 < argc) {
            exit_code = std::atoi(argv[++i]);
        } else {
            if (positional == 0) {
                std::ifstream in(argv[i]);
                std::string line;
                input_seen = static_cast<bool>(std::getline(in, line)) && !line.empty();
            }
            ++positional;
        }
    }
    if (positional != 3 || !input_seen) return 64;
    std::this_thread::sleep_for(std::chrono::duration<double>(sleep_seconds));
    return exit_code;
}
