from hypothesis import settings

# property tests here run numpy-heavy bodies; the default 200 ms deadline
# produces spurious flakes on loaded machines
settings.register_profile("tailtest", deadline=None, max_examples=60)
settings.load_profile("tailtest")
