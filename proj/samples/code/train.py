"""Toy training entry point; the toolkit attests bytes, it never runs them."""

def main():
    print("fitting model on attested datasets")

if __name__ == "__main__":
    main()
