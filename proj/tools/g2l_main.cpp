#include "g2l/labeling.hpp"
int main(){return 0;}
