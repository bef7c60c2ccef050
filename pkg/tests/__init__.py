"""Test package for the Instagram Carousel Generator."""
