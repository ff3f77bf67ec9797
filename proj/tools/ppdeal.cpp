#include <iostream>
int main() { std::cout << "ppdeal\n"; }
