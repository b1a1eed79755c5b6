// Placeholder wired up once the harness lands.
int main() { return 0; }
