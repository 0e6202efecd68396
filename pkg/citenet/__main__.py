from citenet.cli.main import main

main()
