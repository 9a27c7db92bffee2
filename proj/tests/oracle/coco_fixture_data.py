"""Hand-written caption fixture: 10 images, 5 references and 5 candidates each."""

IMAGES = [
    ("img01",
     ["A brown dog runs across a grassy field.",
      "A dog is running on the green grass.",
      "The brown dog sprints through the park.",
      "A large dog running in a field of grass.",
      "A happy dog races across the lawn."],
     ["A brown dog is running through the grass.",
      "A dog runs in a field.",
      "A cat sleeping on a couch.",
      "Dog grass.",
      "A big brown dog with a red collar is running very fast across a large green field on a sunny day."]),
    ("img02",
     ["Two children play soccer on a dirt field.",
      "Kids are kicking a ball in the yard.",
      "Two young boys playing with a soccer ball.",
      "A pair of children chase a ball outside.",
      "Two kids play football on the dirt."],
     ["Two kids are playing soccer.",
      "Children kicking a ball on a field.",
      "A man is cooking dinner in the kitchen.",
      "Two boys play with a ball on the dirt field.",
      "Soccer."]),
    ("img03",
     ["A woman in a red dress walks down the street.",
      "A lady wearing red is walking on a city sidewalk.",
      "A woman strolls along a busy street in a red dress.",
      "The woman in red walks past some shops.",
      "A woman walking outside in a long red dress."],
     ["A woman in a red dress is walking.",
      "A lady walks down a street.",
      "A woman wearing a blue hat sits on a bench.",
      "A woman in a red dress walks down the busy city street past shops and cafes.",
      "Red dress woman."]),
    ("img04",
     ["A man rides a bicycle along a mountain trail.",
      "A cyclist is riding down a dirt path in the hills.",
      "A mountain biker races down a rocky trail.",
      "A man on a bike travels through the mountains.",
      "Someone riding a mountain bike on a narrow trail."],
     ["A man riding a bike on a trail.",
      "A cyclist rides through the mountains.",
      "A boat sails on a calm lake.",
      "A man is riding a mountain bike down a rocky dirt trail in the hills.",
      "Bike trail man mountain."]),
    ("img05",
     ["A group of people sit around a wooden table eating dinner.",
      "Friends are sharing a meal at a long table.",
      "Several people eat food together at a restaurant.",
      "A family eating dinner at a table.",
      "People gathered at a table with plates of food."],
     ["A group of people eating at a table.",
      "Friends share dinner together.",
      "A dog is swimming in a pool.",
      "People sit at a table.",
      "Several friends eat dinner at a long wooden table in a crowded restaurant."]),
    ("img06",
     ["A little girl blows bubbles in the backyard.",
      "A young girl is blowing soap bubbles outside.",
      "A child plays with bubbles on a sunny day.",
      "The girl makes bubbles in the garden.",
      "A small girl blowing bubbles on the grass."],
     ["A girl is blowing bubbles.",
      "A child plays outside in the yard.",
      "An old man reads a newspaper.",
      "A little girl blows soap bubbles in the sunny backyard.",
      "Bubbles bubbles bubbles."]),
    ("img07",
     ["A black and white cat sits on a windowsill.",
      "A cat is sitting by the window looking outside.",
      "A fluffy cat rests on the window ledge.",
      "The cat watches birds from the window.",
      "A cat perched on a sill near a window."],
     ["A cat sitting on a windowsill.",
      "A black cat looks out the window.",
      "A horse is grazing in a pasture.",
      "A fluffy black and white cat sits on the window ledge watching the birds outside.",
      "The window."]),
    ("img08",
     ["A surfer rides a large wave in the ocean.",
      "A man is surfing on a big blue wave.",
      "A person on a surfboard catches a wave.",
      "The surfer balances on top of a breaking wave.",
      "Someone surfing a tall wave at the beach."],
     ["A man surfing a wave.",
      "A surfer in the ocean.",
      "A woman is reading a book in a library.",
      "A surfer rides a big wave at the beach.",
      "Wave wave ocean surfer surfer."]),
    ("img09",
     ["An old man plays a guitar on a street corner.",
      "A street musician is playing the guitar.",
      "An elderly man strums a guitar outside a store.",
      "A man with a gray beard playing music on the sidewalk.",
      "A guitarist performs for people on the street."],
     ["An old man is playing a guitar.",
      "A man plays music on the street.",
      "A girl is riding a horse on the beach.",
      "An elderly street musician with a gray beard strums his guitar on a corner.",
      "Guitar."]),
    ("img10",
     ["A red train travels over a stone bridge.",
      "A train is crossing a bridge in the countryside.",
      "A long passenger train moves across a high bridge.",
      "The red train goes over an old bridge.",
      "A train on a bridge above a river."],
     ["A red train crossing a bridge.",
      "A train goes over a river.",
      "A plate of pasta with tomato sauce.",
      "A long red passenger train travels across an old stone bridge over the river.",
      "Train train bridge."]),
]
