/* x := 0; assert x = 1. */
void check(void) {
  int x;
  x = 0;
  while (x != 1) ;
}
