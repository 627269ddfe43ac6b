from quadcusp.cli import main

main()
