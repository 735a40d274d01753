from selfsim.cli import main

main()
