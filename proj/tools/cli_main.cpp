// cli_main.cpp — dephasimeter command-line front end (placeholder)

int main() { return 0; }
