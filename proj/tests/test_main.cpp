#include <catch2/catch_amalgamated.hpp>

int main(int argc, char* argv[]) {
    Catch::Session session;
    int rc = session.applyCommandLine(argc, argv);
    if (rc != 0) return rc;
    return session.run();
}
